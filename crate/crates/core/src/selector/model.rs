//! The trained selector and its on-disk format.
//!
//! Layout (little-endian): magic `LXRD`, u32 version, u32 input/hidden/output
//! dims, f32 normalization means then stddevs (input each), f32 `w1`
//! (hidden x input, row-major), `b1`, `w2` (output x hidden), `b2`, then the
//! 20-byte descriptor parameter block.

use std::path::Path;

use super::mlp::Mlp;
use crate::binio::{put_f32s, put_u32, ByteReader};
use crate::descriptors::{DescriptorId, DescriptorParams};
use crate::error::{Error, Result};
use crate::store::NormStats;

pub const MODEL_MAGIC: &[u8; 4] = b"LXRD";
pub const MODEL_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub descriptor: DescriptorId,
    pub probabilities: [f64; 3],
}

/// Feedforward descriptor selector. Weights and statistics are held at f32
/// precision so a saved model predicts exactly like the in-memory one.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectorModel {
    pub mlp: Mlp,
    pub norm: NormStats,
    pub descriptor_params: DescriptorParams,
}

impl SelectorModel {
    pub fn new(mlp: Mlp, norm: NormStats) -> Self {
        assert_eq!(mlp.output, 3, "selector chooses among three descriptors");
        assert_eq!(norm.dim(), mlp.input);
        SelectorModel {
            mlp: mlp.to_f32_precision(),
            norm: norm.to_f32_precision(),
            descriptor_params: DescriptorParams::CURRENT,
        }
    }

    /// All-zero weights with identity normalization.
    pub fn untrained(input: usize, hidden: usize) -> Self {
        Self::new(
            Mlp::zeros(input, hidden, 3),
            NormStats {
                mean: vec![0.0; input],
                std: vec![1.0; input],
            },
        )
    }

    pub fn input_dim(&self) -> usize {
        self.mlp.input
    }

    /// Predicts from raw (unnormalized) concatenated features.
    pub fn predict(&self, features: &[f64]) -> Result<Prediction> {
        if features.len() != self.mlp.input {
            return Err(Error::DimensionMismatch {
                expected: self.mlp.input,
                got: features.len(),
            });
        }
        if let Some(i) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let x = self.norm.apply(features);
        let p = self.mlp.forward(&x).probs;
        let probabilities = [p[0], p[1], p[2]];
        let mut best = DescriptorId::Loci;
        for d in DescriptorId::ALL {
            if probabilities[d.index()] > probabilities[best.index()] {
                best = d;
            }
        }
        Ok(Prediction {
            descriptor: best,
            probabilities,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let f32s = |v: &[f64]| v.iter().map(|&x| x as f32).collect::<Vec<f32>>();
        let mut out = Vec::new();
        out.extend_from_slice(MODEL_MAGIC);
        put_u32(&mut out, MODEL_VERSION);
        put_u32(&mut out, self.mlp.input as u32);
        put_u32(&mut out, self.mlp.hidden as u32);
        put_u32(&mut out, self.mlp.output as u32);
        put_f32s(&mut out, &f32s(&self.norm.mean));
        put_f32s(&mut out, &f32s(&self.norm.std));
        put_f32s(&mut out, &f32s(&self.mlp.w1));
        put_f32s(&mut out, &f32s(&self.mlp.b1));
        put_f32s(&mut out, &f32s(&self.mlp.w2));
        put_f32s(&mut out, &f32s(&self.mlp.b2));
        out.extend_from_slice(&self.descriptor_params.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 || &bytes[..4] != MODEL_MAGIC {
            return Err(Error::NotAModel);
        }
        let mut r = ByteReader::new(&bytes[4..], "selector model");
        let version = r.u32()?;
        if version != MODEL_VERSION {
            return Err(Error::VersionMismatch {
                kind: "selector model",
                found: version,
                expected: MODEL_VERSION,
            });
        }
        let input = r.u32()? as usize;
        let hidden = r.u32()? as usize;
        let output = r.u32()? as usize;
        if output != 3 {
            return Err(Error::malformed("selector model", format!("{output} outputs")));
        }
        let mut read = |n: usize| -> Result<Vec<f64>> {
            Ok(r.f32s(n)?.into_iter().map(f64::from).collect())
        };
        let norm = NormStats {
            mean: read(input)?,
            std: read(input)?,
        };
        let mlp = Mlp {
            input,
            hidden,
            output,
            w1: read(hidden.checked_mul(input).ok_or(Error::Truncated("selector model"))?)?,
            b1: read(hidden)?,
            w2: read(output * hidden)?,
            b2: read(output)?,
        };
        let params = r.take(DescriptorParams::ENCODED_LEN)?;
        let descriptor_params = DescriptorParams::from_bytes(params.try_into().unwrap());
        r.finish()?;
        Ok(SelectorModel {
            mlp,
            norm,
            descriptor_params,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_model(seed: u64) -> SelectorModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mlp = Mlp::init(12, 7, 3, &mut rng);
        let norm = NormStats {
            mean: (0..12).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            std: (0..12).map(|_| rng.gen_range(0.1..2.0)).collect(),
        };
        SelectorModel::new(mlp, norm)
    }

    #[test]
    fn round_trip_predicts_identically() {
        let m = random_model(1);
        let back = SelectorModel::from_bytes(&m.to_bytes()).unwrap();
        assert_eq!(back, m);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let x: Vec<f64> = (0..12).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let (a, b) = (m.predict(&x).unwrap(), back.predict(&x).unwrap());
            assert_eq!(a.descriptor, b.descriptor);
            assert_eq!(a.probabilities.map(f64::to_bits), b.probabilities.map(f64::to_bits));
        }
    }

    #[test]
    fn bad_magic_is_not_a_model() {
        let mut bytes = random_model(3).to_bytes();
        bytes[0] = b'X';
        assert!(matches!(SelectorModel::from_bytes(&bytes), Err(Error::NotAModel)));
    }

    #[test]
    fn version_and_truncation_errors() {
        let bytes = random_model(4).to_bytes();
        let mut future = bytes.clone();
        future[4..8].copy_from_slice(&7u32.to_le_bytes());
        let err = SelectorModel::from_bytes(&future).unwrap_err();
        assert!(err.to_string().contains('7') && err.to_string().contains('1'));
        assert!(matches!(
            SelectorModel::from_bytes(&bytes[..bytes.len() - 1]),
            Err(Error::Truncated(_))
        ));
    }

    #[test]
    fn untrained_model_is_uniform_and_picks_loci() {
        let m = SelectorModel::untrained(177, 64);
        let p = m.predict(&vec![0.0; 177]).unwrap();
        assert_eq!(p.descriptor, DescriptorId::Loci);
        assert!(p.probabilities.iter().all(|&v| v == 1.0 / 3.0));
    }

    #[test]
    fn rejects_non_finite_and_wrong_length() {
        let m = SelectorModel::untrained(4, 2);
        assert!(matches!(m.predict(&[0.0, f64::NAN, 0.0, 0.0]), Err(Error::NonFinite(1))));
        assert!(matches!(m.predict(&[0.0; 3]), Err(Error::DimensionMismatch { .. })));
    }
}
