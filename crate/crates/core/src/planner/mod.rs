//! Channel planning: which codec pairs work, how many hidden kilobits per
//! second each one frees, what it costs in voice quality, and which pairs
//! are worth recommending.
//!
//! Bandwidth here is the bitrate-exact figure `overt - covert` (minus 0.4
//! kbps of signaling for the variable-rate covert codec). The packet
//! engine moves whole bytes, so its achieved throughput is the
//! byte-aligned view in [`PairEntry::per_packet_capacity_bytes`]; the two
//! differ by at most one byte per packet.

mod ledger;

pub use ledger::{CostEntry, CostLedger};

use thiserror::Error;

use crate::codecs::{lookup, CodecFamily, CodecId};
use crate::engine;

/// Bits per second spent on the length-signaling byte under a
/// variable-rate covert codec: 8 bits every 20 ms.
pub const SIGNALING_KBPS: f64 = 0.4;

/// The six overt codecs of the planning matrix, highest bitrate first.
pub const OVERT_CODECS: [CodecId; 6] = [
    CodecId::G711,
    CodecId::Speex7,
    CodecId::Ilbc,
    CodecId::Speex4,
    CodecId::G7231,
    CodecId::Speex2,
];

/// Planner errors.
#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("pair ({overt:?}, {covert:?}) is not feasible")]
    Infeasible { overt: CodecId, covert: CodecId },
    #[error("no cost data for pair ({overt:?}, {covert:?})")]
    MissingCost { overt: CodecId, covert: CodecId },
    #[error("ledger line {line}: {msg}")]
    BadLedger { line: usize, msg: String },
    #[error("I/O error: {0}")]
    Io(String),
}

/// Quality class of a pair, by steganographic cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PairClass {
    /// No quality decrease: cost below 0.1 MOS.
    Class0,
    /// Minor decrease: cost in [0.1, 0.5] MOS.
    Class1,
    /// Moderate decrease: cost in (0.5, 1.0] MOS.
    Class2,
    /// Cost above 1.0 MOS, or overall quality below 3.0 MOS.
    Unacceptable,
    /// No cost data available.
    Unknown,
}

impl PairClass {
    pub fn label(self) -> &'static str {
        match self {
            PairClass::Class0 => "class0",
            PairClass::Class1 => "class1",
            PairClass::Class2 => "class2",
            PairClass::Unacceptable => "unacceptable",
            PairClass::Unknown => "unknown",
        }
    }
}

/// One cell of the planning matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PairEntry {
    pub overt: CodecId,
    pub covert: CodecId,
    pub feasible: bool,
    /// Bitrate-exact hidden bandwidth, kbps.
    pub steg_bandwidth_kbps: Option<f64>,
    /// Byte-aligned hidden bytes per packet as the engine will achieve
    /// them (mean value for the variable-rate covert codec).
    pub per_packet_capacity_bytes: Option<u32>,
    pub cost_mos: Option<f64>,
    pub cost_ci_mos: Option<f64>,
    pub overall_quality_mos: Option<f64>,
    pub class: PairClass,
    pub recommended: bool,
}

/// True if `covert` can carry the voice of `overt` inside an unchanged
/// payload: strictly lower bitrate, with the variable-rate lossless codec
/// riding only on G.711.
pub fn feasible(overt: CodecId, covert: CodecId) -> bool {
    engine::pair_feasible(lookup(overt), lookup(covert))
}

/// Bitrate-exact steganographic bandwidth of a feasible pair in kbps.
/// `lossless_mean_kbps` is the measured mean rate of the lossless covert
/// codec; it is only consulted for that codec.
pub fn steg_bandwidth_kbps(
    overt: CodecId,
    covert: CodecId,
    lossless_mean_kbps: f64,
) -> Result<f64, PlanError> {
    if !feasible(overt, covert) {
        return Err(PlanError::Infeasible { overt, covert });
    }
    let overt_kbps = lookup(overt).bitrate_kbps();
    let value = if lookup(covert).family == CodecFamily::Lossless {
        overt_kbps - lossless_mean_kbps - SIGNALING_KBPS
    } else {
        overt_kbps - lookup(covert).bitrate_kbps()
    };
    Ok(value)
}

/// Classify an entry by its cost figures.
pub fn classify(entry: &PairEntry) -> Result<PairClass, PlanError> {
    let cost = entry.cost_mos.ok_or(PlanError::MissingCost {
        overt: entry.overt,
        covert: entry.covert,
    })?;
    let unacceptable_overall = entry.overall_quality_mos.is_some_and(|mos| mos < 3.0);
    Ok(if cost > 1.0 || unacceptable_overall {
        PairClass::Unacceptable
    } else if cost < 0.1 {
        PairClass::Class0
    } else if cost <= 0.5 {
        PairClass::Class1
    } else {
        PairClass::Class2
    })
}

/// Evaluate the full 11x6 matrix: feasibility, bandwidth, engine capacity,
/// cost join and classification, plus recommendation flags.
///
/// `measured_lossless_kbps` overrides the ledger's recorded mean bitrate
/// for the lossless covert codec (e.g. with a freshly measured value).
pub fn build_matrix(ledger: &CostLedger, measured_lossless_kbps: Option<f64>) -> Vec<PairEntry> {
    let lossless_kbps = measured_lossless_kbps
        .or(ledger.lossless_mean_kbps)
        .unwrap_or(0.0);
    let mut entries = Vec::with_capacity(OVERT_CODECS.len() * crate::codecs::registry().len());
    for &overt in &OVERT_CODECS {
        for covert_desc in crate::codecs::registry() {
            let covert = covert_desc.id;
            let is_feasible = feasible(overt, covert);
            let mut entry = PairEntry {
                overt,
                covert,
                feasible: is_feasible,
                steg_bandwidth_kbps: None,
                per_packet_capacity_bytes: None,
                cost_mos: None,
                cost_ci_mos: None,
                overall_quality_mos: None,
                class: PairClass::Unknown,
                recommended: false,
            };
            if is_feasible {
                let kbps = steg_bandwidth_kbps(overt, covert, lossless_kbps)
                    .expect("feasible pair has a bandwidth");
                entry.steg_bandwidth_kbps = Some(kbps);
                entry.per_packet_capacity_bytes = Some(match covert_desc.variable_rate {
                    // mean capacity implied by the measured mean rate:
                    // kbps * 1000 / 8 bytes/s over 50 packets/s
                    true => (kbps * 2.5).round() as u32,
                    false => engine::per_packet_capacity(overt, covert, None)
                        .expect("feasible fixed-rate pair") as u32,
                });
                if let Some(cost) = ledger.cost(overt, covert) {
                    entry.cost_mos = Some(cost.cost_mos);
                    entry.cost_ci_mos = Some(cost.cost_ci_mos);
                    entry.overall_quality_mos = Some(cost.overall_mos);
                    entry.class = classify(&entry).expect("cost present");
                }
            }
            entries.push(entry);
        }
    }
    for (overt, covert) in recommend(&entries)
        .iter()
        .map(|e| (e.overt, e.covert))
        .collect::<Vec<_>>()
    {
        if let Some(entry) = entries
            .iter_mut()
            .find(|e| e.overt == overt && e.covert == covert)
        {
            entry.recommended = true;
        }
    }
    entries
}

/// The recommended subset of a classified matrix.
///
/// Keeps classified, acceptable pairs whose overt codec is itself usable
/// (the two overt codecs that degrade below 3.0 MOS with every covert
/// codec are excluded), then drops Pareto-dominated entries per overt
/// codec: a pair loses when another pair on the same overt codec offers at
/// least the bandwidth at no more cost, better in at least one.
pub fn recommend(matrix: &[PairEntry]) -> Vec<PairEntry> {
    let candidates: Vec<&PairEntry> = matrix
        .iter()
        .filter(|e| {
            e.feasible
                && matches!(
                    e.class,
                    PairClass::Class0 | PairClass::Class1 | PairClass::Class2
                )
                && !matches!(e.overt, CodecId::Speex4 | CodecId::G7231)
        })
        .collect();
    candidates
        .iter()
        .filter(|a| {
            let (a_bw, a_cost) = (
                a.steg_bandwidth_kbps.unwrap_or(0.0),
                a.cost_mos.unwrap_or(f64::INFINITY),
            );
            !candidates.iter().any(|b| {
                b.overt == a.overt
                    && (b.overt, b.covert) != (a.overt, a.covert)
                    && b.steg_bandwidth_kbps.unwrap_or(0.0) >= a_bw
                    && b.cost_mos.unwrap_or(f64::INFINITY) <= a_cost
                    && (b.steg_bandwidth_kbps.unwrap_or(0.0) > a_bw
                        || b.cost_mos.unwrap_or(f64::INFINITY) < a_cost)
            })
        })
        .map(|e| (*e).clone())
        .collect()
}

/// Long-form CSV of the feasible cells, one row per pair.
pub fn matrix_csv(matrix: &[PairEntry]) -> String {
    let mut out = String::from(
        "overt,covert,steg_kbps,capacity_bytes_per_packet,cost_mos,cost_ci_mos,overall_mos,class,recommended\n",
    );
    for e in matrix.iter().filter(|e| e.feasible) {
        let fmt_opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.3}"));
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            lookup(e.overt).token,
            lookup(e.covert).token,
            fmt_opt(e.steg_bandwidth_kbps),
            e.per_packet_capacity_bytes
                .map_or(String::new(), |c| c.to_string()),
            fmt_opt(e.cost_mos),
            fmt_opt(e.cost_ci_mos),
            fmt_opt(e.overall_quality_mos),
            e.class.label(),
            e.recommended,
        ));
    }
    out
}

/// Aligned text table in the same orientation as the published bandwidth
/// matrix: covert codecs as rows, overt codecs as columns, infeasible
/// cells dashed. Recommended cells carry a `+`, unacceptable ones a `!`.
pub fn matrix_table(matrix: &[PairEntry]) -> String {
    let cell = |overt: CodecId, covert: CodecId| -> String {
        let entry = matrix
            .iter()
            .find(|e| e.overt == overt && e.covert == covert)
            .expect("full matrix");
        if !entry.feasible {
            return "--".to_string();
        }
        let bw = entry.steg_bandwidth_kbps.unwrap_or(0.0);
        let marker = if entry.recommended {
            "+"
        } else if entry.class == PairClass::Unacceptable {
            "!"
        } else {
            ""
        };
        format!("{bw:.2}{marker}")
    };
    let mut out = String::new();
    out.push_str(&format!("{:<12}", "covert\\overt"));
    for &overt in &OVERT_CODECS {
        out.push_str(&format!("{:>11}", lookup(overt).display_name));
    }
    out.push('\n');
    for covert in crate::codecs::registry() {
        out.push_str(&format!("{:<12}", covert.display_name));
        for &overt in &OVERT_CODECS {
            out.push_str(&format!("{:>11}", cell(overt, covert.id)));
        }
        out.push('\n');
    }
    out.push_str("\nhidden bandwidth in kbps; -- infeasible, + recommended, ! unacceptable\n");
    out
}
