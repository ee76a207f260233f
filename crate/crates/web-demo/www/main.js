import init, { Demo } from "./pkg/web_demo.js";

const SHAPES = {
  square: [-1, -1, 1, -1, 1, 1, -1, 1],
  pentagon: Array.from({ length: 5 }, (_, k) => {
    const a = Math.PI / 2 + (2 * Math.PI * k) / 5;
    return [Math.cos(a), Math.sin(a)];
  }).flat(),
  triangle: [-1, -0.8, 1, -0.8, 0, 1],
  kite: [0, 1, -0.6, 0.1, 0, -1, 0.9, 0],
};
const IMAGE_HALF_WIDTH = 4;
const GRID_LINES = 14;
const GRID_SAMPLES = 240;

const $ = (id) => document.getElementById(id);
const domainCanvas = $("domain");
const imageCanvas = $("image");

let demo = null;
let domainView = null;
let picked = [];
let clicked = [];
let hover = null;

function viewFor(coords, canvas) {
  const xs = coords.filter((_, i) => i % 2 === 0);
  const ys = coords.filter((_, i) => i % 2 === 1);
  const [x0, x1, y0, y1] = [Math.min(...xs), Math.max(...xs), Math.min(...ys), Math.max(...ys)];
  const scale = (0.9 * canvas.width) / Math.max(x1 - x0, y1 - y0);
  const cx = (x0 + x1) / 2;
  const cy = (y0 + y1) / 2;
  return {
    bounds: [x0, x1, y0, y1],
    toScreen: (x, y) => [canvas.width / 2 + (x - cx) * scale, canvas.height / 2 - (y - cy) * scale],
    toWorld: (sx, sy) => [cx + (sx - canvas.width / 2) / scale, cy - (sy - canvas.height / 2) / scale],
  };
}

const imageView = viewFor([-IMAGE_HALF_WIDTH, -IMAGE_HALF_WIDTH, IMAGE_HALF_WIDTH, IMAGE_HALF_WIDTH], imageCanvas);

// Draws a polyline, breaking it at NaN points.
function polyline(ctx, view, coords, close = false) {
  ctx.beginPath();
  let pen = false;
  for (let i = 0; i < coords.length; i += 2) {
    if (Number.isNaN(coords[i])) {
      pen = false;
      continue;
    }
    const [sx, sy] = view.toScreen(coords[i], coords[i + 1]);
    pen ? ctx.lineTo(sx, sy) : ctx.moveTo(sx, sy);
    pen = true;
  }
  if (close) ctx.closePath();
  ctx.stroke();
}

function dot(ctx, view, x, y, color) {
  const [sx, sy] = view.toScreen(x, y);
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(sx, sy, 3.5, 0, 2 * Math.PI);
  ctx.fill();
}

function gridLines() {
  const [x0, x1, y0, y1] = domainView.bounds;
  const lines = [];
  for (let k = 1; k < GRID_LINES; k++) {
    const fx = x0 + ((x1 - x0) * k) / GRID_LINES;
    const fy = y0 + ((y1 - y0) * k) / GRID_LINES;
    const vertical = [];
    const horizontal = [];
    for (let j = 0; j <= GRID_SAMPLES; j++) {
      vertical.push(fx, y0 + ((y1 - y0) * j) / GRID_SAMPLES);
      horizontal.push(x0 + ((x1 - x0) * j) / GRID_SAMPLES, fy);
    }
    lines.push(vertical, horizontal);
  }
  return lines;
}

let cachedGrid = null;

function draw() {
  const dc = domainCanvas.getContext("2d");
  const ic = imageCanvas.getContext("2d");
  dc.clearRect(0, 0, domainCanvas.width, domainCanvas.height);
  ic.clearRect(0, 0, imageCanvas.width, imageCanvas.height);

  if (!demo) {
    dc.strokeStyle = "#888";
    if (clicked.length) polyline(dc, domainView, clicked);
    for (let i = 0; i < clicked.length; i += 2) dot(dc, domainView, clicked[i], clicked[i + 1], "#333");
    return;
  }

  if ($("grid").checked) {
    cachedGrid ??= gridLines().map((line) => [line, demo.flattenPoints(new Float64Array(line))]);
    dc.strokeStyle = ic.strokeStyle = "#d7e3f4";
    for (const [line, image] of cachedGrid) {
      polyline(dc, domainView, line.map((c, i) => (Number.isNaN(image[i]) ? NaN : c)));
      polyline(ic, imageView, image);
    }
  }

  const cells = demo.cells();
  dc.strokeStyle = "#c9c9c9";
  for (let i = 0; i < cells.length; i += 6) polyline(dc, domainView, cells.slice(i, i + 6), true);
  const gens = demo.coneGenerators();
  ic.strokeStyle = "#c9c9c9";
  for (let i = 0; i < gens.length; i += 2) {
    const s = (2 * IMAGE_HALF_WIDTH) / Math.hypot(gens[i], gens[i + 1]);
    polyline(ic, imageView, [0, 0, gens[i] * s, gens[i + 1] * s]);
  }
  dc.strokeStyle = "#333";
  dc.lineWidth = 2;
  polyline(dc, domainView, Array.from(demo.outline()), true);
  dc.lineWidth = 1;

  if (hover) {
    try {
      const ring = demo.hilbertBall(hover[0], hover[1], Number($("radius").value), 180);
      dc.strokeStyle = ic.strokeStyle = "#d2691e";
      polyline(dc, domainView, ring, true);
      polyline(ic, imageView, demo.flattenPoints(ring), true);
      const image = demo.flattenPoints(new Float64Array(hover));
      dot(dc, domainView, hover[0], hover[1], "#d2691e");
      dot(ic, imageView, image[0], image[1], "#d2691e");
    } catch (_) {
      // Pointer outside the open polygon.
    }
  }

  for (const p of picked) {
    const image = demo.flattenPoints(new Float64Array(p));
    dot(dc, domainView, p[0], p[1], "#1f5fbf");
    dot(ic, imageView, image[0], image[1], "#1f5fbf");
  }
  if (picked.length === 2) {
    const [p, q] = picked;
    const [d, flat, ratio] = demo.compare(p[0], p[1], q[0], q[1]);
    $("readout").textContent =
      `Hilbert distance  ${d.toFixed(6)}\n` +
      `image distance    ${flat.toFixed(6)}\n` +
      `ratio             ${Number.isNaN(ratio) ? "n/a" : ratio.toFixed(6)}`;
  }
}

function load(coords) {
  $("error").textContent = "";
  picked = [];
  cachedGrid = null;
  $("readout").textContent = "";
  try {
    demo = new Demo(new Float64Array(coords));
    domainView = viewFor(coords, domainCanvas);
  } catch (e) {
    demo = null;
    $("error").textContent = String(e.message ?? e);
  }
  draw();
}

function pointer(event, canvas, view) {
  const rect = canvas.getBoundingClientRect();
  return view.toWorld(event.clientX - rect.left, event.clientY - rect.top);
}

domainCanvas.addEventListener("mousemove", (e) => {
  hover = demo ? pointer(e, domainCanvas, domainView) : null;
  draw();
});
domainCanvas.addEventListener("mouseleave", () => {
  hover = null;
  draw();
});
domainCanvas.addEventListener("click", (e) => {
  const p = pointer(e, domainCanvas, domainView);
  if (!demo) {
    clicked.push(...p);
    draw();
    return;
  }
  if (demo.cellAt(p[0], p[1]) < 0) return;
  picked = picked.length === 2 ? [p] : [...picked, p];
  if (picked.length < 2) $("readout").textContent = "click a second point";
  draw();
});

$("shape").addEventListener("change", () => {
  const shape = $("shape").value;
  $("done").hidden = shape !== "custom";
  if (shape === "custom") {
    demo = null;
    clicked = [];
    domainView = viewFor([-1.2, -1.2, 1.2, 1.2], domainCanvas);
    $("readout").textContent = "click at least three vertices, then press the button";
    draw();
  } else {
    load(SHAPES[shape]);
  }
});
$("done").addEventListener("click", () => load(clicked));
$("radius").addEventListener("input", () => {
  $("radius-value").textContent = $("radius").value;
  draw();
});
$("grid").addEventListener("change", draw);

await init();
load(SHAPES[$("shape").value]);
