//! The read-only voice-quality ledger.
//!
//! Format: plain text, `#` comments, three record kinds:
//! `baseline <codec> <single> <double>`,
//! `pair <overt> <covert> <cost> <ci> <overall>`,
//! `lossless_mean_kbps <kbps>`.
//! A copy ships embedded in the library; a file can override it.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;

use crate::codecs::CodecId;

use super::PlanError;

/// Quality figures for one (overt, covert) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostEntry {
    /// MOS drop caused by the covert transcode.
    pub cost_mos: f64,
    /// Half-width of the 95% confidence interval.
    pub cost_ci_mos: f64,
    /// Overall MOS of the full chain.
    pub overall_mos: f64,
}

/// Reference quality data for codec pairs and transcoding baselines.
#[derive(Debug, Clone, Default)]
pub struct CostLedger {
    baselines: BTreeMap<CodecId, (f64, f64)>,
    pairs: BTreeMap<(CodecId, CodecId), CostEntry>,
    /// Measured mean bitrate of the real lossless compressor, if recorded.
    pub lossless_mean_kbps: Option<f64>,
}

impl CostLedger {
    /// The ledger compiled into the library.
    pub fn embedded() -> &'static CostLedger {
        static EMBEDDED: OnceLock<CostLedger> = OnceLock::new();
        EMBEDDED.get_or_init(|| {
            CostLedger::parse(include_str!("mos_ledger.txt"))
                .expect("embedded ledger is well-formed")
        })
    }

    pub fn parse(text: &str) -> Result<CostLedger, PlanError> {
        let mut ledger = CostLedger::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let kind = fields.next().unwrap();
            let bad = |msg: &str| PlanError::BadLedger {
                line: idx + 1,
                msg: msg.to_string(),
            };
            let codec = |fields: &mut std::str::SplitWhitespace| -> Result<CodecId, PlanError> {
                let token = fields.next().ok_or_else(|| bad("missing codec token"))?;
                CodecId::from_token(token)
                    .map_err(|_| bad(&format!("unknown codec token `{token}`")))
            };
            let number = |fields: &mut std::str::SplitWhitespace| -> Result<f64, PlanError> {
                let token = fields.next().ok_or_else(|| bad("missing number"))?;
                token
                    .parse::<f64>()
                    .map_err(|_| bad(&format!("bad number `{token}`")))
            };
            match kind {
                "baseline" => {
                    let id = codec(&mut fields)?;
                    let single = number(&mut fields)?;
                    let double = number(&mut fields)?;
                    ledger.baselines.insert(id, (single, double));
                }
                "pair" => {
                    let overt = codec(&mut fields)?;
                    let covert = codec(&mut fields)?;
                    let cost_mos = number(&mut fields)?;
                    let cost_ci_mos = number(&mut fields)?;
                    let overall_mos = number(&mut fields)?;
                    ledger.pairs.insert(
                        (overt, covert),
                        CostEntry {
                            cost_mos,
                            cost_ci_mos,
                            overall_mos,
                        },
                    );
                }
                "lossless_mean_kbps" => {
                    ledger.lossless_mean_kbps = Some(number(&mut fields)?);
                }
                other => return Err(bad(&format!("unknown record kind `{other}`"))),
            }
            if fields.next().is_some() {
                return Err(bad("trailing fields"));
            }
        }
        Ok(ledger)
    }

    pub fn load(path: &Path) -> Result<CostLedger, PlanError> {
        let text = std::fs::read_to_string(path).map_err(|e| PlanError::Io(e.to_string()))?;
        CostLedger::parse(&text)
    }

    pub fn cost(&self, overt: CodecId, covert: CodecId) -> Option<&CostEntry> {
        self.pairs.get(&(overt, covert))
    }

    /// (single transcode, double transcode) baseline MOS for a codec.
    pub fn baseline(&self, codec: CodecId) -> Option<(f64, f64)> {
        self.baselines.get(&codec).copied()
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_ledger_parses() {
        let ledger = CostLedger::embedded();
        assert_eq!(ledger.pair_count(), 27);
        assert_eq!(ledger.lossless_mean_kbps, Some(31.11));
        let zero = ledger.cost(CodecId::G711, CodecId::G7110).unwrap();
        assert_eq!(zero.cost_mos, 0.0);
        assert_eq!(zero.overall_mos, 4.46);
        assert_eq!(ledger.baseline(CodecId::Speex7), Some((4.17, 3.92)));
    }

    #[test]
    fn cost_is_consistent_with_baselines() {
        // cost ~= single-transcode baseline minus overall, within the
        // rounding of the transcribed figures
        let ledger = CostLedger::embedded();
        for (&(overt, _), entry) in &ledger.pairs {
            let (single, _) = ledger.baseline(overt).unwrap();
            let derived = single - entry.overall_mos;
            assert!(
                (entry.cost_mos - derived).abs() <= 0.015,
                "cost {} vs derived {derived} for {overt:?}",
                entry.cost_mos
            );
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = CostLedger::parse("pair g711 nosuch 1 2 3").unwrap_err();
        assert!(matches!(err, PlanError::BadLedger { line: 1, .. }));
        let err = CostLedger::parse("\n\nwhat 1").unwrap_err();
        assert!(matches!(err, PlanError::BadLedger { line: 3, .. }));
        let err = CostLedger::parse("baseline g711 4.46 4.46 9").unwrap_err();
        assert!(matches!(err, PlanError::BadLedger { .. }));
    }
}
