//! Audio sources: the synthetic speech-shaped corpus and WAV ingest.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::HarnessError;

/// RMS level of active speech segments, dB relative to full scale.
pub const ACTIVE_LEVEL_DBFS: f64 = -26.0;

/// Resonant 2-pole low-pass shaping the white excitation. Pole radius and
/// angle picked so the spectrum peaks around 330 Hz and rolls off fast
/// enough for the waveform to stay smooth on the companded level grid.
const POLE_RADIUS: f64 = 0.97;
const POLE_FREQ_HZ: f64 = 330.0;

/// Deterministic speech-shaped noise: seeded white Gaussian noise through
/// a fixed 2-pole low-pass, gated by the activity pattern (one slot per
/// 160 samples), active level normalized to [`ACTIVE_LEVEL_DBFS`].
pub fn speech_shaped_noise(activity: &[bool], seed: u64) -> Vec<i16> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA0D1_05EE);
    let n = activity.len() * 160;
    let theta = 2.0 * std::f64::consts::PI * POLE_FREQ_HZ / 8000.0;
    let a1 = 2.0 * POLE_RADIUS * theta.cos();
    let a2 = -POLE_RADIUS * POLE_RADIUS;

    let mut shaped = vec![0.0f64; n];
    let mut y1 = 0.0;
    let mut y2 = 0.0;
    for y in shaped.iter_mut() {
        // Box-Muller
        let u1: f64 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen();
        let white = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        let value = white + a1 * y1 + a2 * y2;
        y2 = y1;
        y1 = value;
        *y = value;
    }

    // gate by activity, then normalize active RMS to the target level
    let mut active_energy = 0.0;
    let mut active_count = 0usize;
    for (slot, &on) in activity.iter().enumerate() {
        let range = slot * 160..(slot + 1) * 160;
        if on {
            for &v in &shaped[range] {
                active_energy += v * v;
            }
            active_count += 160;
        } else {
            shaped[range].fill(0.0);
        }
    }
    let target_rms = 32768.0 * 10f64.powf(ACTIVE_LEVEL_DBFS / 20.0);
    let scale = if active_count > 0 && active_energy > 0.0 {
        target_rms / (active_energy / active_count as f64).sqrt()
    } else {
        0.0
    };
    shaped
        .iter()
        .map(|&v| (v * scale).round().clamp(-32768.0, 32767.0) as i16)
        .collect()
}

/// Read a canonical RIFF WAV: PCM, mono, 16-bit, 8 kHz.
pub fn read_wav(path: &Path) -> Result<Vec<i16>, HarnessError> {
    let bytes = std::fs::read(path).map_err(|e| HarnessError::AudioLoad(e.to_string()))?;
    parse_wav(&bytes)
}

fn parse_wav(bytes: &[u8]) -> Result<Vec<i16>, HarnessError> {
    let bad = |msg: &str| HarnessError::AudioLoad(msg.to_string());
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(bad("not a RIFF/WAVE file"));
    }
    let mut pos = 12;
    let mut data: Option<&[u8]> = None;
    let mut format_seen = false;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body_start = pos + 8;
        if body_start + size > bytes.len() {
            return Err(bad("truncated chunk"));
        }
        let body = &bytes[body_start..body_start + size];
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(bad("fmt chunk too small"));
                }
                let audio_format = u16::from_le_bytes([body[0], body[1]]);
                let channels = u16::from_le_bytes([body[2], body[3]]);
                let sample_rate = u32::from_le_bytes([body[4], body[5], body[6], body[7]]);
                let bits = u16::from_le_bytes([body[14], body[15]]);
                if audio_format != 1 {
                    return Err(bad("only uncompressed PCM is supported"));
                }
                if channels != 1 {
                    return Err(bad("only mono input is supported"));
                }
                if bits != 16 {
                    return Err(bad("only 16-bit samples are supported"));
                }
                if sample_rate != 8000 {
                    return Err(HarnessError::BadSampleRate(sample_rate));
                }
                format_seen = true;
            }
            b"data" => data = Some(body),
            _ => {}
        }
        pos = body_start + size + size % 2; // chunks are word-aligned
    }
    if !format_seen {
        return Err(bad("missing fmt chunk"));
    }
    let data = data.ok_or_else(|| bad("missing data chunk"))?;
    Ok(data
        .chunks_exact(2)
        .map(|c| i16::from_le_bytes([c[0], c[1]]))
        .collect())
}

/// Minimal canonical WAV writer for test fixtures.
#[cfg(test)]
pub(crate) fn wav_bytes(samples: &[i16], sample_rate: u32) -> Vec<u8> {
    let data_len = samples.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&(sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for s in samples {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}
