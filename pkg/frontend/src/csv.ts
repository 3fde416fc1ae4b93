/**
 * Readers for the simulator's CSV outputs.
 *
 * Pattern files:   "# scene=..., engine=..., mode=..., seed=..." then x_m,rate
 * Trajectory files: same header then x0_m,slit,z_m,x_m (long format, one
 * block of rows per path, z increasing within a path).
 */

import { readFileSync } from "fs";

export interface RunMeta {
    scene: string;
    engine: string;
    mode: string;
    seed: string;
}

export interface PatternTable {
    meta: RunMeta;
    x: number[];
    rate: number[];
}

export interface TrajectoryPath {
    x0: number;
    slit: string;
    z: number[];
    x: number[];
}

export interface TrajectoryTable {
    meta: RunMeta;
    paths: TrajectoryPath[];
}

export class CsvFormatError extends Error {
    constructor(public file: string, message: string) {
        super(`${file}: ${message}`);
    }
}

function parseMeta(file: string, line: string | undefined): RunMeta {
    if (!line || !line.startsWith("#")) {
        throw new CsvFormatError(file, "missing '# scene=...' header line");
    }
    const meta: Record<string, string> = {};
    for (const part of line.slice(1).split(",")) {
        const [key, value] = part.split("=").map((s) => s.trim());
        if (key && value !== undefined) meta[key] = value;
    }
    for (const key of ["scene", "engine", "mode", "seed"]) {
        if (!(key in meta)) {
            throw new CsvFormatError(file, `header is missing '${key}='`);
        }
    }
    return meta as unknown as RunMeta;
}

function numeric(file: string, raw: string, lineNo: number): number {
    const v = Number(raw);
    if (!Number.isFinite(v)) {
        throw new CsvFormatError(file, `line ${lineNo}: bad number '${raw}'`);
    }
    return v;
}

export function readPatternCsv(file: string): PatternTable {
    const lines = readFileSync(file, "utf-8").split(/\r?\n/);
    const meta = parseMeta(file, lines[0]);
    if (lines[1] !== "x_m,rate") {
        throw new CsvFormatError(file, `expected 'x_m,rate' columns, got '${lines[1]}'`);
    }
    const x: number[] = [];
    const rate: number[] = [];
    lines.slice(2).forEach((line, i) => {
        if (!line) return;
        const parts = line.split(",");
        if (parts.length !== 2) {
            throw new CsvFormatError(file, `line ${i + 3}: expected 2 columns`);
        }
        x.push(numeric(file, parts[0], i + 3));
        rate.push(numeric(file, parts[1], i + 3));
    });
    if (x.length === 0) throw new CsvFormatError(file, "no data rows");
    return { meta, x, rate };
}

export function readTrajectoryCsv(file: string): TrajectoryTable {
    const lines = readFileSync(file, "utf-8").split(/\r?\n/);
    const meta = parseMeta(file, lines[0]);
    if (lines[1] !== "x0_m,slit,z_m,x_m") {
        throw new CsvFormatError(file, `expected 'x0_m,slit,z_m,x_m' columns, got '${lines[1]}'`);
    }
    const paths: TrajectoryPath[] = [];
    let current: TrajectoryPath | null = null;
    lines.slice(2).forEach((line, i) => {
        if (!line) return;
        const parts = line.split(",");
        if (parts.length !== 4) {
            throw new CsvFormatError(file, `line ${i + 3}: expected 4 columns`);
        }
        const x0 = numeric(file, parts[0], i + 3);
        const slit = parts[1];
        const z = numeric(file, parts[2], i + 3);
        const x = numeric(file, parts[3], i + 3);
        // a new path starts whenever z falls back to (or below) the start
        if (!current || current.x0 !== x0 || current.slit !== slit
            || z < current.z[current.z.length - 1]) {
            current = { x0, slit, z: [], x: [] };
            paths.push(current);
        }
        current.z.push(z);
        current.x.push(x);
    });
    if (paths.length === 0) throw new CsvFormatError(file, "no trajectory rows");
    return { meta, paths };
}

export function sameGrid(a: PatternTable, b: PatternTable, tol = 1e-12): boolean {
    if (a.x.length !== b.x.length) return false;
    const scale = Math.max(Math.abs(a.x[0]), Math.abs(a.x[a.x.length - 1]), 1e-30);
    return a.x.every((v, i) => Math.abs(v - b.x[i]) <= tol * scale);
}
