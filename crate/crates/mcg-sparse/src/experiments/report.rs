//! Report serialization: JSON, CSV tables, and a chart script.

use std::path::{Path, PathBuf};

use super::ExperimentReport;
use crate::error::Result;
use crate::util::{atomic_write, fmt_full};

/// Quote a CSV field when needed (RFC 4180: commas, quotes, line breaks).
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Write `report.json`, `success_rates.csv`, `atom_errors.csv`,
/// `iterations.csv`, and `plot.py` into `dir`, atomically, returning the
/// paths written.
pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();

    let json_path = dir.join("report.json");
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    atomic_write(&json_path, json.as_bytes())?;
    written.push(json_path);

    let rates_path = dir.join("success_rates.csv");
    let mut rates = String::from("solver,sparsity,trials,successes,rate\n");
    for sr in &report.solvers {
        for st in &sr.per_sparsity {
            rates.push_str(&format!(
                "{},{},{},{},{}\n",
                csv_field(&sr.label),
                st.sparsity,
                st.trials,
                st.successes,
                fmt_full(st.rate()),
            ));
        }
    }
    atomic_write(&rates_path, rates.as_bytes())?;
    written.push(rates_path);

    let atoms_path = dir.join("atom_errors.csv");
    let mut atoms = String::from("solver,atom,error_count");
    for me in &report.memberships {
        atoms.push_str(&format!(",membership_order_{}", me.order));
    }
    atoms.push('\n');
    for sr in &report.solvers {
        for (atom, &count) in sr.atom_error_counts.iter().enumerate() {
            atoms.push_str(&format!("{},{atom},{count}", csv_field(&sr.label)));
            for me in &report.memberships {
                atoms.push_str(&format!(",{}", me.counts[atom]));
            }
            atoms.push('\n');
        }
    }
    atomic_write(&atoms_path, atoms.as_bytes())?;
    written.push(atoms_path);

    let iters_path = dir.join("iterations.csv");
    let mut iters = String::from("solver,sparsity,mean_iterations\n");
    for sr in &report.solvers {
        for st in &sr.per_sparsity {
            iters.push_str(&format!(
                "{},{},{}\n",
                csv_field(&sr.label),
                st.sparsity,
                fmt_full(st.mean_iterations),
            ));
        }
    }
    atomic_write(&iters_path, iters.as_bytes())?;
    written.push(iters_path);

    let plot_path = dir.join("plot.py");
    atomic_write(&plot_path, PLOT_SCRIPT.as_bytes())?;
    written.push(plot_path);

    Ok(written)
}

const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Render charts from the experiment CSV files in this directory.

Usage: python3 plot.py [directory]

Produces success_rates.png, iterations.png, and one atom_errors_<solver>.png
per solver (error counts as bars, membership histograms as overlaid lines).
"""
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

base = sys.argv[1] if len(sys.argv) > 1 else os.path.dirname(os.path.abspath(__file__))


def read(name):
    with open(os.path.join(base, name), newline="") as f:
        return list(csv.DictReader(f))


rows = read("success_rates.csv")
if rows:
    fig, ax = plt.subplots()
    for solver in sorted({r["solver"] for r in rows}):
        pts = sorted(
            (int(r["sparsity"]), float(r["rate"])) for r in rows if r["solver"] == solver
        )
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=solver)
    ax.set_xlabel("sparsity s")
    ax.set_ylabel("success rate")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.savefig(os.path.join(base, "success_rates.png"), dpi=150, bbox_inches="tight")

rows = read("atom_errors.csv")
if rows:
    member_cols = [c for c in rows[0] if c.startswith("membership_order_")]
    for solver in sorted({r["solver"] for r in rows}):
        sub = sorted(
            (r for r in rows if r["solver"] == solver), key=lambda r: int(r["atom"])
        )
        atoms = [int(r["atom"]) for r in sub]
        fig, ax = plt.subplots()
        ax.bar(
            atoms,
            [int(r["error_count"]) for r in sub],
            color="tab:blue",
            alpha=0.6,
            label="error count",
        )
        ax.set_xlabel("atom")
        ax.set_ylabel("error count")
        if member_cols:
            ax2 = ax.twinx()
            for c in member_cols:
                ax2.plot(
                    atoms,
                    [int(r[c]) for r in sub],
                    marker=".",
                    label=c.replace("membership_order_", "membership, order "),
                )
            ax2.set_ylabel("membership count")
            h1, l1 = ax.get_legend_handles_labels()
            h2, l2 = ax2.get_legend_handles_labels()
            ax.legend(h1 + h2, l1 + l2, loc="upper right")
        else:
            ax.legend(loc="upper right")
        safe = "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in solver)
        fig.savefig(
            os.path.join(base, "atom_errors_%s.png" % safe), dpi=150, bbox_inches="tight"
        )

rows = read("iterations.csv")
if rows:
    fig, ax = plt.subplots()
    for solver in sorted({r["solver"] for r in rows}):
        pts = sorted(
            (int(r["sparsity"]), float(r["mean_iterations"]))
            for r in rows
            if r["solver"] == solver
        )
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=solver)
    ax.set_xlabel("sparsity s")
    ax.set_ylabel("mean iterations")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.savefig(os.path.join(base, "iterations.png"), dpi=150, bbox_inches="tight")

print("wrote charts to", base)
"#;
