use super::config::PipelineConfig;
use crate::error::{Error, Result};

pub const TEAM_COUNT: u32 = 20;

const TEAM_TOML: [&str; TEAM_COUNT as usize] = [
    include_str!("../../configs/team01.toml"),
    include_str!("../../configs/team02.toml"),
    include_str!("../../configs/team03.toml"),
    include_str!("../../configs/team04.toml"),
    include_str!("../../configs/team05.toml"),
    include_str!("../../configs/team06.toml"),
    include_str!("../../configs/team07.toml"),
    include_str!("../../configs/team08.toml"),
    include_str!("../../configs/team09.toml"),
    include_str!("../../configs/team10.toml"),
    include_str!("../../configs/team11.toml"),
    include_str!("../../configs/team12.toml"),
    include_str!("../../configs/team13.toml"),
    include_str!("../../configs/team14.toml"),
    include_str!("../../configs/team15.toml"),
    include_str!("../../configs/team16.toml"),
    include_str!("../../configs/team17.toml"),
    include_str!("../../configs/team18.toml"),
    include_str!("../../configs/team19.toml"),
    include_str!("../../configs/team20.toml"),
];

/// Raw bundled TOML for a team.
pub fn team_config_source(team: u32) -> Result<&'static str> {
    if (1..=TEAM_COUNT).contains(&team) {
        Ok(TEAM_TOML[team as usize - 1])
    } else {
        Err(Error::Lookup(format!("team {team}: bundled configs cover teams 1..={TEAM_COUNT}")))
    }
}

pub fn load_team_config(team: u32) -> Result<PipelineConfig> {
    PipelineConfig::from_toml(team_config_source(team)?).map_err(|e| e.in_stage(format!("team {team} config")))
}
