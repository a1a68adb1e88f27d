//! Fixed-budget transform-coding surrogates for the CELP and RPE-LTP
//! codecs.
//!
//! A surrogate reproduces exactly two things about the codec it stands in
//! for: the bit budget per 20-ms frame, and the fact that decoding yields
//! an approximation of the input rather than noise. Each frame is
//! DCT-transformed; the largest coefficients are transmitted greedily as
//! (index, sign, exponent, mantissa) records of 24 bits each until the
//! budget is spent, and unused budget is zero padding. Deterministic by
//! construction.

use std::sync::OnceLock;

use super::bitio::{BitReader, BitWriter};
use super::registry::{CodecDescriptor, CodecFamily};
use super::{CodecError, EncodedFrame, PcmFrame, FRAME_SAMPLES};

const COEFF_BITS: u32 = 24; // 8 index + 1 sign + 5 exponent + 10 mantissa
const EXP_BIAS: i32 = 7;

fn dct_basis() -> &'static [f64] {
    static BASIS: OnceLock<Vec<f64>> = OnceLock::new();
    BASIS.get_or_init(|| {
        let n = FRAME_SAMPLES;
        let mut basis = vec![0.0; n * n];
        for k in 0..n {
            let alpha = if k == 0 {
                (1.0 / n as f64).sqrt()
            } else {
                (2.0 / n as f64).sqrt()
            };
            for (i, b) in basis[k * n..(k + 1) * n].iter_mut().enumerate() {
                *b = alpha * (std::f64::consts::PI * (2 * i + 1) as f64 * k as f64
                    / (2 * n) as f64)
                    .cos();
            }
        }
        basis
    })
}

fn forward_dct(frame: &PcmFrame) -> [f64; FRAME_SAMPLES] {
    let basis = dct_basis();
    let mut coeffs = [0.0f64; FRAME_SAMPLES];
    for (k, c) in coeffs.iter_mut().enumerate() {
        let row = &basis[k * FRAME_SAMPLES..(k + 1) * FRAME_SAMPLES];
        *c = frame
            .0
            .iter()
            .zip(row)
            .map(|(&x, &b)| f64::from(x) * b)
            .sum();
    }
    coeffs
}

fn inverse_dct(coeffs: &[(usize, f64)]) -> PcmFrame {
    let basis = dct_basis();
    let mut acc = [0.0f64; FRAME_SAMPLES];
    for &(k, c) in coeffs {
        let row = &basis[k * FRAME_SAMPLES..(k + 1) * FRAME_SAMPLES];
        for (a, &b) in acc.iter_mut().zip(row) {
            *a += c * b;
        }
    }
    let mut out = [0i16; FRAME_SAMPLES];
    for (s, &a) in out.iter_mut().zip(acc.iter()) {
        *s = a.round().clamp(f64::from(i16::MIN), f64::from(i16::MAX)) as i16;
    }
    PcmFrame(out)
}

/// Quantize a magnitude to (exponent, mantissa). Exponent field 0 encodes
/// an exact zero; otherwise value = (1 + mant/1024) * 2^(exp - 7).
fn quantize_magnitude(value: f64) -> (u32, u32) {
    if value <= 0.0 || !value.is_finite() {
        return (0, 0);
    }
    let e = (value.to_bits() >> 52) as i32 - 1023;
    let e = e.clamp(-6, 24);
    let mant = ((value / f64::powi(2.0, e) - 1.0) * 1024.0).round();
    let mant = mant.clamp(0.0, 1023.0) as u32;
    ((e + EXP_BIAS) as u32, mant)
}

fn dequantize_magnitude(exp_field: u32, mant: u32) -> f64 {
    if exp_field == 0 {
        return 0.0;
    }
    (1.0 + f64::from(mant) / 1024.0) * f64::powi(2.0, exp_field as i32 - EXP_BIAS)
}

fn check_family(desc: &CodecDescriptor) -> Result<(), CodecError> {
    match desc.family {
        CodecFamily::Celp | CodecFamily::RpeLtp => Ok(()),
        _ => Err(CodecError::Unsupported(
            "surrogate coding covers CELP and RPE-LTP codecs only",
        )),
    }
}

/// Encode a frame into exactly `desc.bits_per_frame` bits.
pub fn surrogate_encode(
    frame: &PcmFrame,
    desc: &CodecDescriptor,
) -> Result<EncodedFrame, CodecError> {
    check_family(desc)?;
    if desc.bits_per_frame < 16 {
        return Err(CodecError::BudgetTooSmall(desc.bits_per_frame));
    }
    let coeffs = forward_dct(frame);
    let keep = (desc.bits_per_frame / COEFF_BITS) as usize;

    let mut order: Vec<usize> = (0..FRAME_SAMPLES).collect();
    order.sort_by(|&a, &b| {
        coeffs[b]
            .abs()
            .partial_cmp(&coeffs[a].abs())
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut selected: Vec<usize> = order.into_iter().take(keep).collect();
    selected.sort_unstable();

    let mut writer = BitWriter::new();
    for index in selected {
        let value = coeffs[index];
        let (exp_field, mant) = quantize_magnitude(value.abs());
        writer.push_bits(index as u32, 8);
        writer.push_bit(value < 0.0);
        writer.push_bits(exp_field, 5);
        writer.push_bits(mant, 10);
    }
    writer.push_run(false, (desc.bits_per_frame - keep as u32 * COEFF_BITS) as usize);
    debug_assert_eq!(writer.bit_len(), desc.bits_per_frame as usize);
    Ok(EncodedFrame::new(
        desc.id,
        writer.finish(),
        desc.bits_per_frame as usize,
    ))
}

/// Invert [`surrogate_encode`] to an approximate frame.
pub fn surrogate_decode(
    encoded: &EncodedFrame,
    desc: &CodecDescriptor,
) -> Result<PcmFrame, CodecError> {
    check_family(desc)?;
    if encoded.bit_length != desc.bits_per_frame as usize
        || encoded.bytes.len() != (desc.bits_per_frame as usize).div_ceil(8)
    {
        return Err(CodecError::WrongLength {
            expected: desc.bits_per_frame as usize,
            actual: encoded.bit_length,
        });
    }
    let keep = (desc.bits_per_frame / COEFF_BITS) as usize;
    let mut reader = BitReader::new(&encoded.bytes);
    let mut coeffs = Vec::with_capacity(keep);
    for _ in 0..keep {
        let index = reader
            .read_bits(8)
            .ok_or(CodecError::CorruptFrame("bitstream exhausted"))? as usize;
        let negative = reader
            .read_bit()
            .ok_or(CodecError::CorruptFrame("bitstream exhausted"))?;
        let exp_field = reader
            .read_bits(5)
            .ok_or(CodecError::CorruptFrame("bitstream exhausted"))?;
        let mant = reader
            .read_bits(10)
            .ok_or(CodecError::CorruptFrame("bitstream exhausted"))?;
        if index >= FRAME_SAMPLES {
            return Err(CodecError::CorruptFrame("coefficient index out of range"));
        }
        let magnitude = dequantize_magnitude(exp_field, mant);
        coeffs.push((index, if negative { -magnitude } else { magnitude }));
    }
    Ok(inverse_dct(&coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codecs::registry::{lookup, CodecId};

    fn sine(amplitude: f64, freq_hz: f64) -> PcmFrame {
        let mut samples = [0i16; FRAME_SAMPLES];
        for (n, s) in samples.iter_mut().enumerate() {
            *s = (amplitude * (2.0 * std::f64::consts::PI * freq_hz * n as f64 / 8000.0).sin())
                as i16;
        }
        PcmFrame(samples)
    }

    fn snr_db(reference: &PcmFrame, degraded: &PcmFrame) -> f64 {
        let mut num = 0f64;
        let mut den = 0f64;
        for (a, b) in reference.0.iter().zip(degraded.0.iter()) {
            num += f64::from(*a).powi(2);
            den += (f64::from(*a) - f64::from(*b)).powi(2);
        }
        if den == 0.0 {
            return f64::INFINITY;
        }
        10.0 * (num / den).log10()
    }

    #[test]
    fn exact_bit_budget_for_every_codec() {
        let frame = sine(11_000.0, 740.0);
        for id in [
            CodecId::Speex7,
            CodecId::Ilbc,
            CodecId::Gsm0610,
            CodecId::Amr122,
            CodecId::Speex4,
            CodecId::G729,
            CodecId::G7231,
            CodecId::Speex2,
        ] {
            let desc = lookup(id);
            let encoded = surrogate_encode(&frame, desc).unwrap();
            assert_eq!(encoded.bit_length, desc.bits_per_frame as usize);
            assert_eq!(encoded.bytes.len(), (desc.bits_per_frame as usize).div_ceil(8));
        }
    }

    #[test]
    fn amr_budget_is_244_bits() {
        let encoded = surrogate_encode(&sine(500.0, 333.0), lookup(CodecId::Amr122)).unwrap();
        assert_eq!(encoded.bit_length, 244);
    }

    #[test]
    fn zero_frame_round_trips_to_zero() {
        let desc = lookup(CodecId::G729);
        let encoded = surrogate_encode(&PcmFrame::silence(), desc).unwrap();
        let decoded = surrogate_decode(&encoded, desc).unwrap();
        assert_eq!(decoded.0, [0i16; FRAME_SAMPLES]);
    }

    #[test]
    fn sine_quality_floor() {
        let desc = lookup(CodecId::Speex7);
        let frame = sine(16_384.0, 1000.0);
        let decoded = surrogate_decode(&surrogate_encode(&frame, desc).unwrap(), desc).unwrap();
        let snr = snr_db(&frame, &decoded);
        assert!(snr >= 10.0, "SNR {snr:.1} dB");
    }

    #[test]
    fn bigger_budget_never_hurts() {
        let wide = lookup(CodecId::Speex7); // 492 bits
        let narrow = lookup(CodecId::Speex2); // 119 bits
        let mut state = 7u64;
        for _ in 0..20 {
            let mut samples = [0i16; FRAME_SAMPLES];
            let mut smooth = 0f64;
            for s in samples.iter_mut() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let noise = ((state >> 33) as i32 - (1 << 30)) as f64 / f64::from(1 << 30);
                smooth = 0.9 * smooth + 2000.0 * noise;
                *s = smooth as i16;
            }
            let frame = PcmFrame(samples);
            let wide_out =
                surrogate_decode(&surrogate_encode(&frame, wide).unwrap(), wide).unwrap();
            let narrow_out =
                surrogate_decode(&surrogate_encode(&frame, narrow).unwrap(), narrow).unwrap();
            assert!(snr_db(&frame, &wide_out) >= snr_db(&frame, &narrow_out));
        }
    }

    #[test]
    fn deterministic() {
        let desc = lookup(CodecId::Gsm0610);
        let frame = sine(7_000.0, 210.0);
        assert_eq!(
            surrogate_encode(&frame, desc).unwrap(),
            surrogate_encode(&frame, desc).unwrap()
        );
    }

    #[test]
    fn waveform_codecs_rejected() {
        let err = surrogate_encode(&PcmFrame::silence(), lookup(CodecId::G711));
        assert!(matches!(err, Err(CodecError::Unsupported(_))));
    }
}
