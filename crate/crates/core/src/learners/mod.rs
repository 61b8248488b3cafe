//! Single-model regressors.
//!
//! Every learner here is deterministic given its inputs and seed. Models
//! that are single-output by construction are fitted once per target column;
//! the shared work (SVD, Gram matrix, standardisation) is done once.

pub mod bayes;
pub mod enet;
pub mod huber;
pub mod kmeans;
pub mod knn;
pub mod linear;
pub mod omp;
pub mod pls;
pub mod svr;

pub use bayes::{fit_bayesian_ridge, BayesianLinearModel, BayesianRidgeParams};
pub use enet::{fit_elastic_net, ElasticNetFit, ElasticNetParams};
pub use huber::{fit_huber, HuberParams};
pub use kmeans::{kmeans, KMeansResult};
pub use knn::{fit_knn, NeighborModel, Weighting};
pub use linear::{fit_ols, fit_ridge, LinearModel, Regularization};
pub use omp::fit_omp;
pub use pls::fit_pls1;
pub use svr::{fit_svr, Kernel, KernelModel, KernelSpec, SvrParams};
