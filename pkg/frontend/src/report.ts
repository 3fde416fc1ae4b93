#!/usr/bin/env node
/**
 * Report tool for simulator CSV outputs.
 *
 *   report patterns <pattern.csv...> [--sum] --out fig.svg
 *   report trajectories <trajectories.csv> [--max-paths N] --out fig.svg
 *
 * `patterns` overlays normalized curves; with --sum (or by default for
 * two inputs) it also draws 0.5*(first+second) and prints that curve's
 * fitted fringe visibility.  `trajectories` draws a z-x fan colored by
 * the slit each path took.
 */

import { writeFileSync } from "fs";
import process from "process";

import { CsvFormatError, readPatternCsv, readTrajectoryCsv,
         sameGrid } from "./csv.js";
import { detectPeriod, fringeAmplitude } from "./fringe.js";
import { Curve, lineChart } from "./svg.js";

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"];
const SLIT_COLORS: Record<string, string> = {
    upper: "#1f77b4",
    lower: "#d62728",
    single: "#2ca02c",
    blocked: "#bbbbbb",
};

interface Args {
    command: string;
    inputs: string[];
    out: string;
    sum: boolean;
    maxPaths: number;
}

function parseArgs(argv: string[]): Args {
    const [command, ...rest] = argv;
    const args: Args = { command: command ?? "", inputs: [], out: "",
                         sum: false, maxPaths: 200 };
    for (let i = 0; i < rest.length; i++) {
        const a = rest[i];
        if (a === "--out") args.out = rest[++i] ?? "";
        else if (a === "--sum") args.sum = true;
        else if (a === "--max-paths") args.maxPaths = Number(rest[++i]);
        else if (a.startsWith("--")) throw new Error(`unknown flag ${a}`);
        else args.inputs.push(a);
    }
    if (!args.out) throw new Error("--out <file.svg> is required");
    if (!Number.isInteger(args.maxPaths) || args.maxPaths < 1) {
        throw new Error("--max-paths expects a positive integer");
    }
    return args;
}

export function runPatterns(args: Args): string[] {
    if (args.inputs.length === 0) throw new Error("no pattern files given");
    const tables = args.inputs.map(readPatternCsv);
    for (const t of tables.slice(1)) {
        if (!sameGrid(tables[0], t)) {
            throw new CsvFormatError(args.inputs[tables.indexOf(t)],
                "pattern grids differ; overlay needs matching x_m columns");
        }
    }
    // one common scale across curves: per-curve normalization would break
    // the exact fringe/anti-fringe cancellation in the averaged sum,
    // because a finite scan window weighs the two patterns differently
    const totals = tables.map((t) => t.rate.reduce((s, v) => s + v, 0));
    const common = totals.reduce((s, v) => s + v, 0) / totals.length || 1;
    const scaled = tables.map((t) => t.rate.map((v) => v / common));

    const messages: string[] = [];
    const curves: Curve[] = tables.map((t, i) => ({
        label: `${t.meta.scene} ${t.meta.engine} ${t.meta.mode}`,
        x: t.x,
        y: scaled[i],
        color: PALETTE[i % PALETTE.length],
    }));

    const wantSum = args.sum || tables.length === 2;
    if (wantSum && tables.length >= 2) {
        const [a, b] = scaled;
        const sum = a.map((v, i) => 0.5 * (v + b[i]));
        curves.push({ label: "0.5 x (sum)", x: tables[0].x, y: sum,
                      color: "#444444", dash: "6 4" });
        const period = detectPeriod(tables[0].x, a);
        const vis = fringeAmplitude(tables[0].x, sum, period);
        messages.push(`sum fitted visibility: ${vis.toExponential(3)} `
            + `(fringe period ${(period * 1e3).toFixed(3)} mm)`);
    }
    const svg = lineChart(curves, "detection patterns (normalized)",
                          "x (m)", "rate (normalized)");
    writeFileSync(args.out, svg);
    messages.push(`wrote ${args.out}`);
    return messages;
}

export function runTrajectories(args: Args): string[] {
    if (args.inputs.length !== 1) {
        throw new Error("trajectories takes exactly one CSV");
    }
    const table = readTrajectoryCsv(args.inputs[0]);
    const stride = Math.max(1, Math.ceil(table.paths.length / args.maxPaths));
    const chosen = table.paths.filter((_, i) => i % stride === 0)
        .slice(0, args.maxPaths);
    const seen = new Set<string>();
    const curves: Curve[] = chosen.map((p) => {
        const label = seen.has(p.slit) ? "" : `slit: ${p.slit}`;
        seen.add(p.slit);
        return { label, x: p.z, y: p.x,
                 color: SLIT_COLORS[p.slit] ?? "#444444" };
    });
    const svg = lineChart(curves,
        `guided trajectories (${table.meta.scene}, ${chosen.length} paths)`,
        "z (m)", "x (m)");
    writeFileSync(args.out, svg);
    return [`wrote ${args.out} (${chosen.length} paths)`];
}

export function main(argv: string[]): number {
    let args: Args;
    try {
        args = parseArgs(argv);
    } catch (err) {
        console.error(`error: ${(err as Error).message}`);
        return 2;
    }
    try {
        let messages: string[];
        if (args.command === "patterns") messages = runPatterns(args);
        else if (args.command === "trajectories") messages = runTrajectories(args);
        else {
            console.error("usage: report patterns <csv...> [--sum] --out fig.svg\n"
                + "       report trajectories <csv> [--max-paths N] --out fig.svg");
            return 2;
        }
        for (const m of messages) console.log(m);
        return 0;
    } catch (err) {
        console.error(`error: ${(err as Error).message}`);
        return 1;
    }
}

if (process.argv[1] && (process.argv[1].endsWith("report.js")
        || process.argv[1].endsWith("eraserbench-report"))) {
    process.exit(main(process.argv.slice(2)));
}
