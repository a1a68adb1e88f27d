//! G.726 ADPCM at 32 kbps: 4-bit codes, adaptive quantizer, adaptive
//! predictor with 2 poles and 6 zeros.
//!
//! Ported from the public-domain CCITT reference structure (the classic
//! Sun Microsystems g72x implementation of Recommendation G.721/G.726).
//! All state arithmetic uses the reference's internal floating-point
//! format: 4-bit exponent in bits 6..10, 6-bit mantissa in bits 0..6,
//! sign carried by the value.

use super::{CodecError, CodecId, EncodedFrame, PcmFrame, FRAME_SAMPLES};

const POWER2: [i32; 15] = [
    1, 2, 4, 8, 0x10, 0x20, 0x40, 0x80, 0x100, 0x200, 0x400, 0x800, 0x1000, 0x2000, 0x4000,
];

/// Maps code word to reconstructed scale-factor-normalized log magnitude.
const DQLNTAB: [i32; 16] = [
    -2048, 4, 135, 213, 273, 323, 373, 425, 425, 373, 323, 273, 213, 135, 4, -2048,
];

/// Maps code word to log of the scale factor multiplier.
const WITAB: [i32; 16] = [
    -12, 18, 41, 64, 112, 198, 355, 1122, 1122, 355, 198, 112, 64, 41, 18, -12,
];

/// Maps code word to the stationarity estimate input.
const FITAB: [i32; 16] = [
    0, 0, 0, 0x200, 0x200, 0x200, 0x600, 0xE00, 0xE00, 0x600, 0x200, 0x200, 0x200, 0, 0, 0,
];

/// Quantizer decision levels for 32 kbps (7 boundaries, 4-bit codes).
const QTAB: [i32; 7] = [-124, 80, 178, 246, 300, 349, 400];

/// Index of the first table entry greater than `val`.
fn quan(val: i32, table: &[i32]) -> i32 {
    table.iter().position(|&t| val < t).unwrap_or(table.len()) as i32
}

/// Multiply a predictor coefficient by a signal value kept in the internal
/// floating-point format.
fn fmult(an: i32, srn: i32) -> i32 {
    let anmag = if an > 0 { an } else { (-an) & 0x1FFF };
    let anexp = quan(anmag, &POWER2) - 6;
    let anmant = if anmag == 0 {
        32
    } else if anexp >= 0 {
        anmag >> anexp
    } else {
        anmag << -anexp
    };
    let wanexp = anexp + ((srn >> 6) & 0xF) - 13;
    let wanmant = (anmant * (srn & 0x3F) + 0x30) >> 4;
    let retval = if wanexp >= 0 {
        (wanmant << wanexp) & 0x7FFF
    } else {
        wanmant >> -wanexp
    };
    if (an ^ srn) < 0 {
        -retval
    } else {
        retval
    }
}

/// Per-stream codec state. Reset at stream start only; both directions of
/// a transcoding pipeline carry their own instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct G726State {
    /// Locked (steady-state) scale factor, 19-bit fixed point.
    yl: i32,
    /// Unlocked scale factor.
    yu: i32,
    /// Short-term code magnitude average.
    dms: i32,
    /// Long-term code magnitude average.
    dml: i32,
    /// Speed control parameter mixing yl and yu.
    ap: i32,
    /// Pole coefficients of the predictor.
    a: [i32; 2],
    /// Zero coefficients of the predictor.
    b: [i32; 6],
    /// Signs of the last two pole-prediction differences.
    pk: [i32; 2],
    /// Last six quantized differences (internal float format).
    dq: [i32; 6],
    /// Last two reconstructed signals (internal float format).
    sr: [i32; 2],
    /// Delayed tone detector.
    td: bool,
}

impl Default for G726State {
    fn default() -> Self {
        G726State {
            yl: 34816,
            yu: 544,
            dms: 0,
            dml: 0,
            ap: 0,
            a: [0; 2],
            b: [0; 6],
            pk: [0; 2],
            dq: [32; 6],
            sr: [32; 2],
            td: false,
        }
    }
}

impl G726State {
    pub fn new() -> Self {
        Self::default()
    }

    fn predictor_zero(&self) -> i32 {
        (0..6).map(|i| fmult(self.b[i] >> 2, self.dq[i])).sum()
    }

    fn predictor_pole(&self) -> i32 {
        fmult(self.a[1] >> 2, self.sr[1]) + fmult(self.a[0] >> 2, self.sr[0])
    }

    fn step_size(&self) -> i32 {
        if self.ap >= 256 {
            return self.yu;
        }
        let y = self.yl >> 6;
        let dif = self.yu - y;
        let al = self.ap >> 2;
        if dif > 0 {
            y + ((dif * al) >> 6)
        } else if dif < 0 {
            y + ((dif * al + 0x3F) >> 6)
        } else {
            y
        }
    }

    /// Common post-sample state adaptation (identical on both sides, which
    /// is what keeps a remote decoder in sync with the encoder).
    #[allow(clippy::too_many_arguments)]
    fn update(&mut self, y: i32, wi: i32, fi: i32, dq: i32, sr: i32, dqsez: i32) {
        let pk0 = i32::from(dqsez < 0);
        let mag = dq & 0x7FFF;

        // TRANS: tone / transition detection threshold from yl
        let ylint = self.yl >> 15;
        let ylfrac = (self.yl >> 10) & 0x1F;
        let thr1 = (32 + ylfrac) << ylint;
        let thr2 = if ylint > 9 { 31 << 10 } else { thr1 };
        let dqthr = (thr2 + (thr2 >> 1)) >> 1;
        let tr = self.td && mag > dqthr;

        // FUNCTW, FILTD, LIMB, FILTE: scale factor adaptation
        self.yu = (y + ((wi - y) >> 5)).clamp(544, 5120);
        self.yl += self.yu + ((-self.yl) >> 6);

        let mut a2p: i32 = 0;
        if tr {
            self.a = [0; 2];
            self.b = [0; 6];
        } else {
            // UPA2, LIMC: second pole coefficient
            let pks1 = pk0 ^ self.pk[0];
            a2p = self.a[1] - (self.a[1] >> 7);
            if dqsez != 0 {
                let fa1 = if pks1 != 0 { self.a[0] } else { -self.a[0] };
                if fa1 < -8191 {
                    a2p -= 0x100;
                } else if fa1 > 8191 {
                    a2p += 0xFF;
                } else {
                    a2p += fa1 >> 5;
                }
                if pk0 ^ self.pk[1] != 0 {
                    if a2p <= -12160 {
                        a2p = -12288;
                    } else if a2p >= 12416 {
                        a2p = 12288;
                    } else {
                        a2p -= 0x80;
                    }
                } else if a2p <= -12416 {
                    a2p = -12288;
                } else if a2p >= 12160 {
                    a2p = 12288;
                } else {
                    a2p += 0x80;
                }
            }
            self.a[1] = a2p;

            // UPA1, LIMD: first pole coefficient
            self.a[0] -= self.a[0] >> 8;
            if dqsez != 0 {
                if pks1 == 0 {
                    self.a[0] += 192;
                } else {
                    self.a[0] -= 192;
                }
            }
            let a1ul = 15360 - a2p;
            self.a[0] = self.a[0].clamp(-a1ul, a1ul);

            // UPB: zero coefficients
            for i in 0..6 {
                self.b[i] -= self.b[i] >> 8;
                if mag != 0 {
                    if (dq ^ self.dq[i]) >= 0 {
                        self.b[i] += 128;
                    } else {
                        self.b[i] -= 128;
                    }
                }
            }
        }

        // DELAY + FLOAT A: shift in dq as internal float
        for i in (1..6).rev() {
            self.dq[i] = self.dq[i - 1];
        }
        self.dq[0] = if mag == 0 {
            if dq >= 0 {
                0x20
            } else {
                0x20 - 0x400
            }
        } else {
            let exp = quan(mag, &POWER2);
            let f = (exp << 6) + ((mag << 6) >> exp);
            if dq >= 0 {
                f
            } else {
                f - 0x400
            }
        };

        // FLOAT B: reconstructed signal as internal float
        self.sr[1] = self.sr[0];
        self.sr[0] = if sr == 0 {
            0x20
        } else if sr > 0 {
            let exp = quan(sr, &POWER2);
            (exp << 6) + ((sr << 6) >> exp)
        } else if sr > -32768 {
            let m = -sr;
            let exp = quan(m, &POWER2);
            (exp << 6) + ((m << 6) >> exp) - 0x400
        } else {
            0x20 - 0x400
        };

        self.pk[1] = self.pk[0];
        self.pk[0] = pk0;

        // TONE
        self.td = !tr && a2p < -11776;

        // FILTA, FILTB, SUBTC: adaptation speed
        self.dms += (fi - self.dms) >> 5;
        self.dml += ((fi << 2) - self.dml) >> 7;
        if tr {
            self.ap = 256;
        } else if y < 1536 || self.td || ((self.dms << 2) - self.dml).abs() >= (self.dml >> 3) {
            self.ap += (0x200 - self.ap) >> 4;
        } else {
            self.ap += (-self.ap) >> 4;
        }
    }

    /// Encode one 16-bit sample to a 4-bit code.
    pub fn encode_sample(&mut self, sample: i16) -> u8 {
        let sl = i32::from(sample) >> 2; // 14-bit operating range

        let sezi = self.predictor_zero();
        let sez = sezi >> 1;
        let se = (sezi + self.predictor_pole()) >> 1;

        let d = sl - se;
        let y = self.step_size();
        let code = quantize(d, y);
        let dq = reconstruct(code & 8 != 0, DQLNTAB[code as usize], y);
        let sr = if dq < 0 { se - (dq & 0x3FFF) } else { se + dq };
        let dqsez = sr + sez - se;

        self.update(y, WITAB[code as usize] << 5, FITAB[code as usize], dq, sr, dqsez);
        code as u8
    }

    /// Decode one 4-bit code to a 16-bit sample.
    pub fn decode_sample(&mut self, code: u8) -> i16 {
        let code = i32::from(code & 0x0F);

        let sezi = self.predictor_zero();
        let sez = sezi >> 1;
        let se = (sezi + self.predictor_pole()) >> 1;

        let y = self.step_size();
        let dq = reconstruct(code & 8 != 0, DQLNTAB[code as usize], y);
        let sr = if dq < 0 { se - (dq & 0x3FFF) } else { se + dq };
        let dqsez = sr + sez - se;

        self.update(y, WITAB[code as usize] << 5, FITAB[code as usize], dq, sr, dqsez);
        (sr << 2).clamp(i32::from(i16::MIN), i32::from(i16::MAX)) as i16
    }

    /// Encode a 20-ms frame: 160 samples to 80 bytes, first sample in the
    /// high nibble of each byte.
    pub fn encode_frame(&mut self, frame: &PcmFrame) -> EncodedFrame {
        let mut bytes = Vec::with_capacity(FRAME_SAMPLES / 2);
        for pair in frame.0.chunks_exact(2) {
            let hi = self.encode_sample(pair[0]);
            let lo = self.encode_sample(pair[1]);
            bytes.push(hi << 4 | lo);
        }
        EncodedFrame::new(CodecId::G726, bytes, FRAME_SAMPLES * 4)
    }

    /// Decode 80 bytes back to a 20-ms frame.
    pub fn decode_frame(&mut self, encoded: &EncodedFrame) -> Result<PcmFrame, CodecError> {
        if encoded.bytes.len() != FRAME_SAMPLES / 2 {
            return Err(CodecError::WrongLength {
                expected: FRAME_SAMPLES / 2,
                actual: encoded.bytes.len(),
            });
        }
        let mut out = [0i16; FRAME_SAMPLES];
        for (i, &byte) in encoded.bytes.iter().enumerate() {
            out[2 * i] = self.decode_sample(byte >> 4);
            out[2 * i + 1] = self.decode_sample(byte & 0x0F);
        }
        Ok(PcmFrame(out))
    }
}

/// Quantize the prediction difference `d` against step size `y`.
fn quantize(d: i32, y: i32) -> i32 {
    let dqm = d.abs();
    let exp = quan(dqm >> 1, &POWER2);
    let mant = ((dqm << 7) >> exp) & 0x7F;
    let dl = (exp << 7) + mant;
    let dln = dl - (y >> 2);
    let i = quan(dln, &QTAB);
    if d < 0 {
        15 - i
    } else if i == 0 {
        15
    } else {
        i
    }
}

/// Rebuild the quantized difference from its normalized log magnitude.
fn reconstruct(sign: bool, dqln: i32, y: i32) -> i32 {
    let dql = dqln + (y >> 2);
    if dql < 0 {
        if sign {
            -0x8000
        } else {
            0
        }
    } else {
        let dex = (dql >> 7) & 15;
        let dqt = 128 + (dql & 127);
        let dq = (dqt << 7) >> (14 - dex);
        if sign {
            dq - 0x8000
        } else {
            dq
        }
    }
}
