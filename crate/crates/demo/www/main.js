import init, { g2_explorer, saturation_fit, spectrum_fit } from "./pkg/photon_stats_demo.js";

const num = (id) => Number(document.getElementById(id).value);

// Minimal line/point plot; series are {x, y, kind: "line" | "dots", color, err?}.
function plot(canvas, series, xlabel, ylabel) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height;
  const pad = { l: 70, r: 15, t: 10, b: 40 };
  ctx.clearRect(0, 0, w, h);
  let xs = [], ys = [];
  for (const s of series) {
    xs = xs.concat(Array.from(s.x));
    ys = ys.concat(Array.from(s.y).filter(Number.isFinite));
  }
  const x0 = Math.min(...xs), x1 = Math.max(...xs);
  const y0 = Math.min(0, ...ys), y1 = Math.max(...ys) * 1.05 || 1;
  const px = (x) => pad.l + ((x - x0) / (x1 - x0 || 1)) * (w - pad.l - pad.r);
  const py = (y) => h - pad.b - ((y - y0) / (y1 - y0 || 1)) * (h - pad.t - pad.b);

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad.l, pad.t, w - pad.l - pad.r, h - pad.t - pad.b);
  ctx.fillStyle = "#333";
  ctx.font = "12px sans-serif";
  for (let i = 0; i <= 4; i++) {
    const xv = x0 + ((x1 - x0) * i) / 4, yv = y0 + ((y1 - y0) * i) / 4;
    ctx.fillText(xv.toPrecision(3), px(xv) - 12, h - pad.b + 15);
    ctx.fillText(yv.toPrecision(3), 5, py(yv) + 4);
  }
  ctx.fillText(xlabel, w / 2 - 30, h - 8);
  ctx.save();
  ctx.translate(14, h / 2 + 20);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(ylabel, 0, 0);
  ctx.restore();

  for (const s of series) {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    if (s.kind === "line") {
      ctx.beginPath();
      s.x.forEach((x, i) => (i ? ctx.lineTo(px(x), py(s.y[i])) : ctx.moveTo(px(x), py(s.y[i]))));
      ctx.lineWidth = 2;
      ctx.stroke();
      ctx.lineWidth = 1;
    } else {
      s.x.forEach((x, i) => {
        ctx.fillRect(px(x) - 1.5, py(s.y[i]) - 1.5, 3, 3);
        if (s.err) {
          ctx.beginPath();
          ctx.moveTo(px(x), py(s.y[i] - s.err[i]));
          ctx.lineTo(px(x), py(s.y[i] + s.err[i]));
          ctx.stroke();
        }
      });
    }
  }
}

function guarded(outId, body) {
  const out = document.getElementById(outId);
  try {
    out.classList.remove("err");
    out.textContent = body();
  } catch (e) {
    out.classList.add("err");
    out.textContent = String(e);
  }
}

const fmt = (v, d = 4) => (Number.isFinite(v) ? v.toPrecision(d) : "n/a");

function runG2() {
  guarded("g2-out", () => {
    const three = document.getElementById("g2-scheme").value === "3";
    const v = g2_explorer(three, num("g2-power"), num("g2-rho"), num("g2-eta"),
      num("g2-jitter"), num("g2-dur"), BigInt(num("g2-seed")));
    const series = [
      { x: v.tau_ns, y: v.measured, err: v.sigma, kind: "dots", color: "#1f77b4" },
      { x: v.tau_ns, y: v.theory, kind: "line", color: "#aaa" },
    ];
    if (v.fitted.length) series.push({ x: v.tau_ns, y: v.fitted, kind: "line", color: "#d62728" });
    plot(document.getElementById("g2-plot"), series, "τ (ns)", "g²(τ)");
    let text = `clicks ${v.clicks}\n`;
    if (three) {
      text += `bunching excess ${fmt(v.bunching_sigma, 3)} σ`;
    } else {
      text += `k_T = ${fmt(v.k_t_per_s)} ± ${fmt(v.k_t_sigma, 2)} /s   g²(0) = ${fmt(v.g2_0, 3)}`;
    }
    return v.note ? `${text}\n${v.note}` : text;
  });
}

function runSat() {
  guarded("sat-out", () => {
    const v = saturation_fit(num("sat-eta"), num("sat-dwell"), num("sat-max"), BigInt(num("sat-seed")));
    plot(document.getElementById("sat-plot"), [
      { x: v.power_uw, y: v.rate_cps, err: v.sigma_cps, kind: "dots", color: "#1f77b4" },
      { x: v.model_power_uw, y: v.model_cps, kind: "line", color: "#d62728" },
    ], "P (μW)", "rate (cps)");
    return `I_sat = ${fmt(v.i_sat)} ± ${fmt(v.i_sat_sigma, 2)} cps\n` +
      `P_sat = ${fmt(v.p_sat)} ± ${fmt(v.p_sat_sigma, 2)} μW\n` +
      `η = I_sat / k21 = ${fmt(v.efficiency, 3)}`;
  });
}

function runSpec() {
  guarded("sp-out", () => {
    const v = spectrum_fit(num("sp-center"), num("sp-fwhm"), num("sp-share"), num("sp-peak"), BigInt(num("sp-seed")));
    plot(document.getElementById("sp-plot"), [
      { x: v.wavelength_nm, y: v.intensity, kind: "line", color: "#1f77b4" },
      { x: v.wavelength_nm, y: v.zpl_model, kind: "line", color: "#d62728" },
    ], "λ (nm)", "intensity");
    return `center ${fmt(v.center_nm, 6)} nm   FWHM ${fmt(v.fwhm_nm)} nm\n` +
      `ZPL share (fit) ${fmt(v.huang_rhys, 3)}   (±2 FWHM window) ${fmt(v.window_fraction, 3)}`;
  });
}

await init();
document.getElementById("g2-run").onclick = runG2;
document.getElementById("sat-run").onclick = runSat;
document.getElementById("sp-run").onclick = runSpec;
runG2();
runSat();
runSpec();
