import init, { evaluate_team, rank, team_config } from "./pkg/connecto_wasm.js";

const $ = (id) => document.getElementById(id);

function showError(target, err) {
  target.innerHTML = "";
  const p = document.createElement("p");
  p.className = "error";
  p.textContent = String(err && err.message ? err.message : err);
  target.appendChild(p);
}

function table(headers, rows) {
  const t = document.createElement("table");
  const head = t.insertRow();
  for (const h of headers) {
    const th = document.createElement("th");
    th.textContent = h;
    head.appendChild(th);
  }
  for (const r of rows) {
    const tr = t.insertRow();
    for (const v of r) tr.insertCell().textContent = v;
  }
  return t;
}

function drawHeat(matrix) {
  const canvas = $("heat");
  const ctx = canvas.getContext("2d");
  const n = matrix.length;
  const cell = canvas.width / n;
  const max = Math.max(1e-12, ...matrix.flat());
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const v = matrix[i][j] / max;
      ctx.fillStyle = `rgb(255, ${Math.round(255 * (1 - v))}, ${Math.round(255 * (1 - v))})`;
      ctx.fillRect(j * cell, i * cell, Math.ceil(cell), Math.ceil(cell));
    }
  }
}

function showConfig() {
  try {
    $("config").textContent = team_config(Number($("team").value));
  } catch (e) {
    $("config").textContent = String(e);
  }
}

function runEvaluation() {
  const out = $("metrics");
  out.textContent = "fitting…";
  // Let the status text paint before the synchronous fit.
  setTimeout(() => {
    try {
      const r = JSON.parse(
        evaluate_team(
          Number($("team").value),
          Number($("subjects").value),
          Number($("rois").value),
          Number($("drift").value),
          Number($("noise").value),
          BigInt($("seed").value || 0),
        ),
      );
      out.innerHTML = "";
      out.appendChild(
        table(
          ["", "value"],
          [
            ["pipeline", r.team],
            ["train / test subjects", `${r.train_subjects} / ${r.test_subjects}`],
            ["features", r.features],
            ["MAE", r.mae.toFixed(5)],
            ["MSE", r.mse.toExponential(3)],
            ["PCC", r.pcc.toFixed(4)],
            ["no-change MAE", r.no_change_mae.toFixed(5)],
            ["fitted models", r.models],
          ],
        ),
      );
      out.appendChild(
        table(
          ["stage", "rows", "features"],
          r.stages.map((s) => [s.stage, s.rows, s.features]),
        ),
      );
      drawHeat(r.residual);
    } catch (e) {
      showError(out, e);
    }
  }, 10);
}

function runRanking() {
  const out = $("standings");
  try {
    const rows = JSON.parse(rank($("scores").value, $("agg").value));
    out.innerHTML = "";
    out.appendChild(
      table(
        ["final", "team", "MAE local", "MAE rank", "PCC local", "PCC rank"],
        rows.map((r) => [r.final_rank, r.team, r.mae_local.join(" / "), r.mae_rank, r.pcc_local.join(" / "), r.pcc_rank]),
      ),
    );
  } catch (e) {
    showError(out, e);
  }
}

await init();
for (let t = 1; t <= 20; t++) {
  const o = document.createElement("option");
  o.value = t;
  o.textContent = `Team ${t}`;
  if (t === 11) o.selected = true;
  $("team").appendChild(o);
}
$("team").addEventListener("change", showConfig);
$("run").addEventListener("click", runEvaluation);
$("rank").addEventListener("click", runRanking);
showConfig();
