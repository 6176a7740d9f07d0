//! Human-readable and JSON reports for the compare command.

use serde::Serialize;

use cdpr_core::sim::{feedforward_torque_at, reference};

use crate::config::ShaperVariant;
use crate::runner::VariantRun;

/// Prototype reference peak-to-peak for a variant, measured on the CREATOR
/// hardware. Context only; not a desk reproduction target.
pub fn reference_peak_to_peak(variant: ShaperVariant) -> f64 {
    match variant {
        ShaperVariant::None => reference::PEAK_TO_PEAK_UNSHAPED,
        ShaperVariant::Zv => reference::PEAK_TO_PEAK_ZV,
        ShaperVariant::Zvd => reference::PEAK_TO_PEAK_ZVD,
        ShaperVariant::Zvzv => reference::PEAK_TO_PEAK_ZVZV,
        ShaperVariant::Zvdzvd => reference::PEAK_TO_PEAK_ZVDZVD,
    }
}

#[derive(Debug, Serialize)]
pub struct CompareRow {
    pub shaper: String,
    pub peak_to_peak_mps: f64,
    pub reduction_vs_unshaped_pct: Option<f64>,
    pub prototype_peak_to_peak_mps: f64,
    pub oscillation_detected: bool,
    pub shaper_delay_s: f64,
    pub torque_start_nm: Vec<f64>,
    pub torque_end_nm: Vec<f64>,
    pub torque_reduction_start_pct: Option<Vec<f64>>,
    pub torque_reduction_end_pct: Option<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub note: String,
}

/// Builds the compare report. Torque columns sample the feed-forward torque
/// set-point at matched instants across variants: motion start and the
/// nominal trajectory end `tf_nominal`.
pub fn build_report(runs: &[VariantRun], tf_nominal: f64) -> CompareReport {
    let baseline = runs.iter().find(|r| r.variant == ShaperVariant::None);
    let base_p2p = baseline.map(|b| b.metrics.peak_to_peak);
    let base_torque = baseline.map(|b| {
        (
            feedforward_torque_at(&b.trace, 0.0),
            feedforward_torque_at(&b.trace, tf_nominal),
        )
    });
    let pct = |r: &[f64], s: &[f64]| -> Vec<f64> {
        r.iter()
            .zip(s)
            .map(|(&a, &b)| if a != 0.0 { (a - b) / a * 100.0 } else { 0.0 })
            .collect()
    };
    let rows = runs
        .iter()
        .map(|run| {
            let reduction = base_p2p.and_then(|b| {
                if run.variant == ShaperVariant::None || b == 0.0 {
                    None
                } else {
                    Some((1.0 - run.metrics.peak_to_peak / b) * 100.0)
                }
            });
            let torque_start = feedforward_torque_at(&run.trace, 0.0);
            let torque_end = feedforward_torque_at(&run.trace, tf_nominal);
            let torque_red = base_torque.as_ref().and_then(|(bs, be)| {
                if run.variant == ShaperVariant::None {
                    None
                } else {
                    Some((pct(bs, &torque_start), pct(be, &torque_end)))
                }
            });
            CompareRow {
                shaper: run.variant.name().to_string(),
                peak_to_peak_mps: run.metrics.peak_to_peak,
                reduction_vs_unshaped_pct: reduction,
                prototype_peak_to_peak_mps: reference_peak_to_peak(run.variant),
                oscillation_detected: run.metrics.oscillation_detected,
                shaper_delay_s: run.shaper.delay(),
                torque_start_nm: torque_start,
                torque_end_nm: torque_end,
                torque_reduction_start_pct: torque_red.as_ref().map(|t| t.0.clone()),
                torque_reduction_end_pct: torque_red.map(|t| t.1),
            }
        })
        .collect();
    CompareReport {
        rows,
        note: format!(
            "prototype columns are hardware measurements shown for context only \
             (best observed torque reduction {} %); the virtual plant has no \
             unmodeled disturbance floor and is not expected to reproduce them",
            reference::MAX_TORQUE_REDUCTION_PCT
        ),
    }
}

/// Fixed-width table, 4-digit rounding for human eyes.
pub fn render_table(report: &CompareReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<8} {:>14} {:>12} {:>16} {:>10}\n",
        "shaper", "p2p [m/s]", "red. [%]", "prototype [m/s]", "delay [s]"
    ));
    for row in &report.rows {
        let red = row
            .reduction_vs_unshaped_pct
            .map(|r| format!("{r:.1}"))
            .unwrap_or_else(|| "-".to_string());
        out.push_str(&format!(
            "{:<8} {:>14.4e} {:>12} {:>16.4} {:>10.4}\n",
            row.shaper, row.peak_to_peak_mps, red, row.prototype_peak_to_peak_mps,
            row.shaper_delay_s
        ));
    }
    out.push('\n');
    out.push_str(&format!(
        "{:<8} {:>30} {:>30}\n",
        "shaper", "ff torque at start [N m]", "ff torque at tf [N m]"
    ));
    for row in &report.rows {
        let fmt_vec = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:.4}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        out.push_str(&format!(
            "{:<8} {:>30} {:>30}\n",
            row.shaper,
            fmt_vec(&row.torque_start_nm),
            fmt_vec(&row.torque_end_nm)
        ));
    }
    out.push('\n');
    out.push_str(&report.note);
    out.push('\n');
    out
}
