/**
 * Fringe-visibility estimation on sampled patterns.
 *
 * The modulation amplitude at a trial period comes from a Hann-weighted
 * least-squares fit of baseline (1, t^2, t^4) plus cos/sin terms; the
 * taper and the explicit baseline keep a smooth diffraction envelope
 * from registering as fringe contrast.  The fringe period itself is
 * found by scanning trial periods for the strongest response.
 */

function solve(a: number[][], b: number[]): number[] {
    // Gaussian elimination with partial pivoting; matrices here are 5x5
    const n = b.length;
    const m = a.map((row, i) => [...row, b[i]]);
    for (let col = 0; col < n; col++) {
        let pivot = col;
        for (let r = col + 1; r < n; r++) {
            if (Math.abs(m[r][col]) > Math.abs(m[pivot][col])) pivot = r;
        }
        [m[col], m[pivot]] = [m[pivot], m[col]];
        const d = m[col][col];
        if (d === 0) throw new Error("singular normal equations");
        for (let r = 0; r < n; r++) {
            if (r === col) continue;
            const f = m[r][col] / d;
            for (let c = col; c <= n; c++) m[r][c] -= f * m[col][c];
        }
    }
    return m.map((row, i) => row[n] / m[i][i]);
}

export function fringeAmplitude(x: number[], y: number[], period: number): number {
    const n = x.length;
    if (n < 8) throw new Error("too few samples for a fringe fit");
    const lo = Math.min(...x);
    const hi = Math.max(...x);
    const width = hi - lo;
    const mid = (lo + hi) / 2;
    const w = (2 * Math.PI) / period;

    const basis = (i: number): number[] => {
        const t = (x[i] - mid) / width;
        return [1, t * t, t ** 4, Math.cos(w * x[i]), Math.sin(w * x[i])];
    };
    const hann = (i: number) => 0.5 * (1 + Math.cos((2 * Math.PI * (x[i] - mid)) / width));

    const ata = Array.from({ length: 5 }, () => new Array(5).fill(0));
    const atb = new Array(5).fill(0);
    for (let i = 0; i < n; i++) {
        const row = basis(i);
        const h = hann(i);
        for (let r = 0; r < 5; r++) {
            atb[r] += h * row[r] * y[i];
            for (let c = 0; c < 5; c++) ata[r][c] += h * row[r] * row[c];
        }
    }
    const coef = solve(ata, atb);
    let baseSum = 0;
    let hSum = 0;
    for (let i = 0; i < n; i++) {
        const row = basis(i);
        const h = hann(i);
        baseSum += h * (coef[0] * row[0] + coef[1] * row[1] + coef[2] * row[2]);
        hSum += h;
    }
    const base = baseSum / hSum;
    if (base === 0) return 0;
    return Math.hypot(coef[3], coef[4]) / Math.abs(base);
}

/** Strongest-response fringe period, scanned then locally refined.
 *
 * The sweep stays below a third of the window width (at long trial
 * periods the cosine is collinear with the smooth baseline and the
 * amplitude ratio is meaningless); the overlay window therefore needs
 * to hold at least ~3 fringe periods.
 */
export function detectPeriod(x: number[], y: number[]): number {
    const width = Math.max(...x) - Math.min(...x);
    const hi = width / 3;
    const lo = width / 50;
    let best = hi;
    let bestVal = -1;
    for (let k = 0; k < 160; k++) {
        const period = hi * Math.pow(lo / hi, k / 159); // geometric sweep
        const v = fringeAmplitude(x, y, period);
        if (v > bestVal) {
            bestVal = v;
            best = period;
        }
    }
    for (let pass = 0; pass < 3; pass++) {
        const step = best * 0.05 / Math.pow(4, pass);
        for (const candidate of [best - step, best + step]) {
            const v = fringeAmplitude(x, y, candidate);
            if (v > bestVal) {
                bestVal = v;
                best = candidate;
            }
        }
    }
    return best;
}
