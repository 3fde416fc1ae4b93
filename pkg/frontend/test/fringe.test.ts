import { describe, expect, it } from "vitest";

import { detectPeriod, fringeAmplitude } from "../src/fringe.js";

function grid(n = 400, halfSpan = 5e-3): number[] {
    return Array.from({ length: n }, (_, i) => -halfSpan + (2 * halfSpan * i) / (n - 1));
}

const envelope = (x: number) => {
    const u = (Math.PI * 80e-6 * x) / 700e-9;
    const s = u === 0 ? 1 : Math.sin(u) / u;
    return s * s;
};

describe("fringeAmplitude", () => {
    it("recovers the modulation of a clean fringe", () => {
        const x = grid();
        for (const vis of [1.0, 0.55]) {
            const y = x.map((v) => 1 + vis * Math.cos((2 * Math.PI * v) / 2.8e-3));
            expect(fringeAmplitude(x, y, 2.8e-3)).toBeCloseTo(vis, 3);
        }
    });

    it("stays near zero on a smooth diffraction envelope", () => {
        const x = grid();
        const y = x.map(envelope);
        expect(fringeAmplitude(x, y, 2.8e-3)).toBeLessThan(0.01);
    });

    it("handles an enveloped fringe", () => {
        const x = grid();
        const y = x.map((v) => envelope(v) * (1 + Math.cos((2 * Math.PI * v) / 2.8e-3)));
        expect(fringeAmplitude(x, y, 2.8e-3)).toBeGreaterThan(0.9);
    });
});

describe("detectPeriod", () => {
    it("finds the fringe period of an enveloped pattern", () => {
        const x = grid();
        const y = x.map((v) => envelope(v) * (1 + Math.cos((2 * Math.PI * v) / 2.8e-3)));
        const period = detectPeriod(x, y);
        expect(Math.abs(period - 2.8e-3) / 2.8e-3).toBeLessThan(0.05);
    });
});
