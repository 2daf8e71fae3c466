//! `trace.csv`, `sweep.csv` and the one-row `evaluate.csv`.
//!
//! Floats use Rust's shortest round-trip formatting, so equal runs give
//! equal bytes.

use std::fmt::Write as _;

use crate::diffuse::EnergyBreakdown;
use crate::optimizer::{SweepRow, TraceRow};

pub const TRACE_HEADER: &str = "iter,e_total,e_bulk,e_perimeter,e_anchor_outer,e_inner_isotropic,e_inner_anchor,volume,grad_norm_n,grad_norm_phi,grad_norm_v,tau_n,tau_phi,tau_v,eps_phi,eps_v";
pub const SWEEP_HEADER: &str = "lambda,e_total,e_bulk,e_perimeter,e_anchor_outer,e_inner_isotropic,e_inner_anchor,max_abs_n_dot_nu,iterations,termination,monotone";
pub const EVALUATE_HEADER: &str = "e_total,e_bulk,e_perimeter,e_anchor_outer,e_inner_isotropic,e_inner_anchor,volume";

fn energy_fields(e: &EnergyBreakdown) -> String {
    format!("{},{},{},{},{},{}", e.e_total, e.e_bulk, e.e_perimeter, e.e_anchor_outer, e.e_inner_isotropic, e.e_inner_anchor)
}

pub fn trace_row(r: &TraceRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        r.iter,
        energy_fields(&r.energy),
        r.volume,
        r.grad_norm[0],
        r.grad_norm[1],
        r.grad_norm[2],
        r.tau[0],
        r.tau[1],
        r.tau[2],
        r.eps_phi,
        r.eps_v
    )
}

pub fn trace(rows: &[TraceRow]) -> String {
    let mut s = String::from(TRACE_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&trace_row(r));
        s.push('\n');
    }
    s
}

pub fn sweep(rows: &[SweepRow]) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    let mut prev = f64::NEG_INFINITY;
    for r in rows {
        let monotone = r.energy.e_total >= prev;
        prev = r.energy.e_total;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.lambda,
            energy_fields(&r.energy),
            r.residual,
            r.iterations,
            r.termination.as_str(),
            u8::from(monotone)
        );
    }
    s
}

pub fn evaluate(e: &EnergyBreakdown, volume: f64) -> String {
    format!("{EVALUATE_HEADER}\n{},{volume}\n", energy_fields(e))
}
