/** Minimal SVG chart builder: polyline plots with axes and a legend. */

export interface Curve {
    label: string;
    x: number[];
    y: number[];
    color: string;
    dash?: string;
}

const WIDTH = 860;
const HEIGHT = 520;
const MARGIN = { left: 70, right: 24, top: 28, bottom: 52 };

function extent(values: number[]): [number, number] {
    let lo = Infinity;
    let hi = -Infinity;
    for (const v of values) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
    }
    if (lo === hi) {
        lo -= 1;
        hi += 1;
    }
    return [lo, hi];
}

function ticks(lo: number, hi: number, count = 6): number[] {
    const span = hi - lo;
    const step = Math.pow(10, Math.floor(Math.log10(span / count)));
    const candidates = [step, 2 * step, 5 * step, 10 * step];
    const chosen = candidates.find((s) => span / s <= count) ?? 10 * step;
    const first = Math.ceil(lo / chosen) * chosen;
    const out: number[] = [];
    for (let v = first; v <= hi + 1e-12 * span; v += chosen) out.push(v);
    return out;
}

const fmt = (v: number) => {
    if (v === 0) return "0";
    const a = Math.abs(v);
    if (a >= 0.01 && a < 10000) return String(Number(v.toPrecision(4)));
    return v.toExponential(1);
};

export function lineChart(curves: Curve[], title: string,
                          xLabel: string, yLabel: string): string {
    const xs = curves.flatMap((c) => c.x);
    const ys = curves.flatMap((c) => c.y);
    const [x0, x1] = extent(xs);
    const [rawY0, y1] = extent(ys);
    const y0 = Math.min(0, rawY0);
    const plotW = WIDTH - MARGIN.left - MARGIN.right;
    const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
    const sx = (v: number) => MARGIN.left + ((v - x0) / (x1 - x0)) * plotW;
    const sy = (v: number) => MARGIN.top + plotH - ((v - y0) / (y1 - y0)) * plotH;

    const parts: string[] = [];
    parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`);
    parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
    parts.push(`<text x="${WIDTH / 2}" y="18" text-anchor="middle" font-size="15">${title}</text>`);

    for (const t of ticks(x0, x1)) {
        const px = sx(t);
        parts.push(`<line x1="${px}" y1="${MARGIN.top}" x2="${px}" y2="${MARGIN.top + plotH}" stroke="#ddd"/>`);
        parts.push(`<text x="${px}" y="${MARGIN.top + plotH + 18}" text-anchor="middle" font-size="11">${fmt(t)}</text>`);
    }
    for (const t of ticks(y0, y1)) {
        const py = sy(t);
        parts.push(`<line x1="${MARGIN.left}" y1="${py}" x2="${MARGIN.left + plotW}" y2="${py}" stroke="#ddd"/>`);
        parts.push(`<text x="${MARGIN.left - 6}" y="${py + 4}" text-anchor="end" font-size="11">${fmt(t)}</text>`);
    }
    parts.push(`<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333"/>`);
    parts.push(`<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-size="13">${xLabel}</text>`);
    parts.push(`<text transform="translate(16 ${MARGIN.top + plotH / 2}) rotate(-90)" text-anchor="middle" font-size="13">${yLabel}</text>`);

    for (const c of curves) {
        const pts = c.x.map((v, i) => `${sx(v).toFixed(2)},${sy(c.y[i]).toFixed(2)}`).join(" ");
        const dash = c.dash ? ` stroke-dasharray="${c.dash}"` : "";
        parts.push(`<polyline points="${pts}" fill="none" stroke="${c.color}" stroke-width="1.6"${dash}/>`);
    }

    const labelled = curves.filter((c) => c.label);
    labelled.forEach((c, i) => {
        const ly = MARGIN.top + 16 + 18 * i;
        const lx = MARGIN.left + plotW - 170;
        parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 26}" y2="${ly - 4}" stroke="${c.color}" stroke-width="2"${c.dash ? ` stroke-dasharray="${c.dash}"` : ""}/>`);
        parts.push(`<text x="${lx + 32}" y="${ly}" font-size="12">${c.label}</text>`);
    });

    parts.push("</svg>");
    return parts.join("\n");
}
