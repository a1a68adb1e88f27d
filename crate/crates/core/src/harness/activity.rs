//! Conversational on/off gating at 20-ms resolution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::HarnessError;

/// Mean talk-spurt length in slots (1 second).
const MEAN_TALK_SLOTS: f64 = 50.0;

/// Alternating talk-spurt/silence pattern with exponential segment
/// lengths, one slot per 20 ms. The pattern is corrected to hit the
/// requested on-fraction exactly (by extending or trimming spurts at
/// their boundaries), so any duration satisfies the +-2% tolerance.
pub fn synth_activity(
    duration_s: f64,
    activity_ratio: f64,
    seed: u64,
) -> Result<Vec<bool>, HarnessError> {
    if !(activity_ratio > 0.0 && activity_ratio <= 1.0) {
        return Err(HarnessError::BadRatio(activity_ratio));
    }
    let slots = (duration_s * 50.0).ceil() as usize;
    if activity_ratio == 1.0 {
        return Ok(vec![true; slots]);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mean_off = MEAN_TALK_SLOTS * (1.0 - activity_ratio) / activity_ratio;
    let mut pattern = Vec::with_capacity(slots);
    let mut talking = rng.gen::<f64>() < activity_ratio;
    while pattern.len() < slots {
        let mean = if talking { MEAN_TALK_SLOTS } else { mean_off };
        let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
        let len = ((-mean * u.ln()).round().max(1.0) as usize).min(slots - pattern.len());
        pattern.extend(std::iter::repeat_n(talking, len));
        talking = !talking;
    }

    let target = (activity_ratio * slots as f64).round() as usize;
    let mut count = pattern.iter().filter(|&&b| b).count();
    if count == 0 {
        pattern[..target].fill(true);
        count = target;
    } else if count == slots {
        pattern[target..].fill(false);
        count = target;
    }
    // Flip slots at spurt boundaries (circularly) until the count is
    // exact. While both states are present a boundary always exists, so
    // every sweep makes progress.
    let mut i = 0;
    while count != target {
        let prev = pattern[(i + slots - 1) % slots];
        let next = pattern[(i + 1) % slots];
        if count < target {
            if !pattern[i] && prev {
                pattern[i] = true;
                count += 1;
            }
        } else if pattern[i] && !next {
            pattern[i] = false;
            count -= 1;
        }
        i = (i + 1) % slots;
    }
    Ok(pattern)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn on_fraction(pattern: &[bool]) -> f64 {
        pattern.iter().filter(|&&b| b).count() as f64 / pattern.len() as f64
    }

    #[test]
    fn full_ratio_is_all_on() {
        let pattern = synth_activity(10.0, 1.0, 1).unwrap();
        assert_eq!(pattern.len(), 500);
        assert!(pattern.iter().all(|&b| b));
    }

    #[test]
    fn fraction_hits_tolerance() {
        for seed in 0..20 {
            let pattern = synth_activity(60.0, 0.465, seed).unwrap();
            assert_eq!(pattern.len(), 3000);
            let f = on_fraction(&pattern);
            assert!((0.445..=0.485).contains(&f), "seed {seed}: fraction {f}");
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            synth_activity(30.0, 0.4, 7).unwrap(),
            synth_activity(30.0, 0.4, 7).unwrap()
        );
        assert_ne!(
            synth_activity(30.0, 0.4, 7).unwrap(),
            synth_activity(30.0, 0.4, 8).unwrap()
        );
    }

    #[test]
    fn has_alternating_structure() {
        let pattern = synth_activity(60.0, 0.465, 3).unwrap();
        let transitions = pattern.windows(2).filter(|w| w[0] != w[1]).count();
        // ~28 cycles expected; accept a broad band, reject degenerate all-on
        assert!((10..=200).contains(&transitions), "{transitions}");
    }

    #[test]
    fn bad_ratio_rejected() {
        assert!(matches!(
            synth_activity(10.0, 0.0, 0),
            Err(HarnessError::BadRatio(_))
        ));
        assert!(matches!(
            synth_activity(10.0, 1.5, 0),
            Err(HarnessError::BadRatio(_))
        ));
    }
}
