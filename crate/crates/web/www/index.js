import init, { birthTimes, curveColumns, familyCurves, xStateReport } from "./pkg/hidden_corr_web.js";

const SAMPLES = 1501;
const SERIES = [
  ["C", "#444"],
  ["B", "#d33"],
  ["BF3", "#e80"],
  ["D", "#a3a"],
  ["HB", "#15c"],
  ["HBF3", "#2a8"],
  ["HD", "#0aa"],
];

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function drawCurves(data, columns, tauMax) {
  const canvas = $("plot");
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 40;
  const width = columns.length;
  const rows = data.length / width;
  const x = (t) => pad + (w - 2 * pad) * (t / tauMax);
  const y = (v) => h - pad - (h - 2 * pad) * v;

  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.font = "12px sans-serif";
  for (let i = 0; i <= 5; i++) {
    const t = (tauMax * i) / 5;
    ctx.fillText(t.toFixed(0), x(t) - 6, h - pad + 16);
    ctx.fillText((i / 5).toFixed(1), 8, y(i / 5) + 4);
  }
  ctx.fillText("Γt", w / 2, h - 6);

  SERIES.forEach(([name, colour], k) => {
    const col = columns.indexOf(name);
    ctx.strokeStyle = colour;
    ctx.lineWidth = name.startsWith("H") ? 2 : 1;
    ctx.beginPath();
    for (let r = 0; r < rows; r++) {
      const px = x(data[r * width]), py = y(data[r * width + col]);
      r === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
    }
    ctx.stroke();
    ctx.fillStyle = colour;
    ctx.fillText(name, w - pad - 60, pad + 16 + 14 * k);
  });
}

function fmt(t) {
  return Number.isNaN(t) ? "–" : t.toFixed(4);
}

function updateTrajectory() {
  const p = num("p"), k = num("k"), tauMax = num("tau-max");
  $("p-val").textContent = p.toFixed(4);
  $("k-val").textContent = k.toFixed(2);
  try {
    drawCurves(familyCurves(p, k, tauMax, SAMPLES), curveColumns(), tauMax);
    const b = birthTimes(p, k, tauMax, SAMPLES);
    const rows = [
      ["C", b[2], NaN],
      ["HD", b[3], b[6]],
      ["HBF3", b[4], b[7]],
      ["HB", b[5], b[8]],
    ];
    $("births").tBodies[0].innerHTML = rows
      .map(([n, t, s]) => `<tr><td>${n}</td><td>${fmt(t)}</td><td>${fmt(s)}</td></tr>`)
      .join("");
    $("cmax").textContent = `max C = ${b[0].toExponential(3)} at Γt = ${b[1].toFixed(2)}`;
    $("cmax").className = "";
  } catch (e) {
    $("cmax").textContent = String(e);
    $("cmax").className = "error";
  }
}

function updateReport() {
  try {
    $("report").textContent = xStateReport(
      num("xa"), num("xb"), num("xc"), num("xd"), num("xzr"), num("xzi"), num("xwr"), num("xwi"));
    $("report").className = "";
  } catch (e) {
    $("report").textContent = String(e);
    $("report").className = "error";
  }
}

await init();
for (const id of ["p", "k", "tau-max"]) $(id).addEventListener("input", updateTrajectory);
for (const id of ["xa", "xb", "xc", "xd", "xzr", "xzi", "xwr", "xwi"]) $(id).addEventListener("input", updateReport);
updateTrajectory();
updateReport();
