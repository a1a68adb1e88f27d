//! Segmental SNR, the quality proxy for the locally implemented codecs.

use super::HarnessError;

const SEGMENT: usize = 160;
/// Segments whose reference energy sits below this level carry no speech
/// and are excluded from the average.
const ENERGY_FLOOR_DBFS: f64 = -60.0;
const CLAMP_LOW_DB: f64 = -10.0;
const CLAMP_HIGH_DB: f64 = 60.0;

/// Mean per-20-ms-segment SNR of `degraded` against `reference`, in dB.
/// Each segment is clamped to [-10, 60] dB; segments below the energy
/// floor are skipped. `None` when no segment carries energy.
pub fn segmental_snr(reference: &[i16], degraded: &[i16]) -> Result<Option<f64>, HarnessError> {
    if reference.len() != degraded.len() {
        return Err(HarnessError::LengthMismatch {
            reference: reference.len(),
            degraded: degraded.len(),
        });
    }
    let floor_mean_square = 32768.0f64.powi(2) * 10f64.powf(ENERGY_FLOOR_DBFS / 10.0);
    let mut total = 0.0;
    let mut segments = 0usize;
    for (ref_seg, deg_seg) in reference.chunks(SEGMENT).zip(degraded.chunks(SEGMENT)) {
        let signal: f64 = ref_seg.iter().map(|&s| f64::from(s).powi(2)).sum();
        if signal / (ref_seg.len() as f64) < floor_mean_square {
            continue;
        }
        let error: f64 = ref_seg
            .iter()
            .zip(deg_seg)
            .map(|(&a, &b)| (f64::from(a) - f64::from(b)).powi(2))
            .sum();
        let snr = if error == 0.0 {
            CLAMP_HIGH_DB
        } else {
            (10.0 * (signal / error).log10()).clamp(CLAMP_LOW_DB, CLAMP_HIGH_DB)
        };
        total += snr;
        segments += 1;
    }
    Ok((segments > 0).then(|| total / segments as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(n: usize, amplitude: f64) -> Vec<i16> {
        (0..n)
            .map(|i| {
                (amplitude * (2.0 * std::f64::consts::PI * 440.0 * i as f64 / 8000.0).sin()) as i16
            })
            .collect()
    }

    #[test]
    fn identical_signals_hit_the_clamp() {
        let x = tone(1600, 10000.0);
        assert_eq!(segmental_snr(&x, &x).unwrap(), Some(60.0));
    }

    #[test]
    fn doubled_signal_is_zero_db() {
        // degraded = 2*ref makes the error exactly the reference
        let x = tone(1600, 9000.0);
        let doubled: Vec<i16> = x.iter().map(|&s| s * 2).collect();
        let snr = segmental_snr(&x, &doubled).unwrap().unwrap();
        assert!(snr.abs() < 1e-9, "snr {snr}");
    }

    #[test]
    fn silent_segments_are_skipped() {
        let mut x = tone(1600, 8000.0);
        x[..160].fill(0); // first segment silent
        let y = x.clone();
        assert_eq!(segmental_snr(&x, &y).unwrap(), Some(60.0));
        let silence = vec![0i16; 320];
        assert_eq!(segmental_snr(&silence, &silence).unwrap(), None);
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(matches!(
            segmental_snr(&[0; 10], &[0; 11]),
            Err(HarnessError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn alaw_single_pass_quality() {
        use crate::codecs::{alaw_decode, alaw_encode};
        use crate::harness::{speech_shaped_noise, synth_activity};
        let activity = synth_activity(10.0, 0.5, 4).unwrap();
        let pcm = speech_shaped_noise(&activity, 4);
        let coded: Vec<i16> = pcm.iter().map(|&s| alaw_decode(alaw_encode(s))).collect();
        let snr = segmental_snr(&pcm, &coded).unwrap().unwrap();
        assert!(snr >= 25.0, "A-law single pass {snr:.1} dB");
    }
}
