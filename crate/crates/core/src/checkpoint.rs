//! Versioned binary checkpoints for DON and policy models.
//!
//! Layout (little endian): magic `GORDCKPT`, u32 version, u8 kind, u64 seed,
//! u32 layer count, then per layer u64 inputs, u64 outputs, the weight
//! array and the bias array as raw f64 bits. Loading restores the exact
//! bits that were saved.

use std::path::Path;

use crate::don::{DonModel, DonShape};
use crate::error::{Error, Result};
use crate::nn::Dense;
use crate::policy::PolicyModel;

const MAGIC: &[u8; 8] = b"GORDCKPT";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum ModelKind {
    Don = 1,
    Policy = 2,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Checkpoint {
    Don(DonModel),
    Policy(PolicyModel),
}

fn encode(kind: ModelKind, seed: u64, layers: &[&Dense]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(kind as u8);
    out.extend_from_slice(&seed.to_le_bytes());
    out.extend_from_slice(&(layers.len() as u32).to_le_bytes());
    for l in layers {
        out.extend_from_slice(&(l.inputs as u64).to_le_bytes());
        out.extend_from_slice(&(l.outputs as u64).to_le_bytes());
        for x in l.weight.iter().chain(&l.bias) {
            out.extend_from_slice(&x.to_bits().to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        let end = self
            .at
            .checked_add(k)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Checkpoint("truncated file".into()))?;
        let s = &self.bytes[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64s(&mut self, k: usize) -> Result<Vec<f64>> {
        let bytes = self.take(k.checked_mul(8).ok_or_else(|| Error::Checkpoint("layer too large".into()))?)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_bits(u64::from_le_bytes(c.try_into().unwrap())))
            .collect())
    }

    fn dense(&mut self) -> Result<Dense> {
        let inputs = self.u64()? as usize;
        let outputs = self.u64()? as usize;
        let size = inputs
            .checked_mul(outputs)
            .ok_or_else(|| Error::Checkpoint("layer too large".into()))?;
        Ok(Dense {
            inputs,
            outputs,
            weight: self.f64s(size)?,
            bias: self.f64s(outputs)?,
        })
    }
}

impl Checkpoint {
    pub fn kind(&self) -> ModelKind {
        match self {
            Checkpoint::Don(_) => ModelKind::Don,
            Checkpoint::Policy(_) => ModelKind::Policy,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            Checkpoint::Don(m) => encode(ModelKind::Don, m.seed, &m.layer_list()),
            Checkpoint::Policy(m) => encode(ModelKind::Policy, m.seed, &[&m.hidden, &m.out]),
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, at: 0 };
        if r.take(8)? != MAGIC {
            return Err(Error::Checkpoint("not a checkpoint file".into()));
        }
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let kind = r.take(1)?[0];
        let seed = r.u64()?;
        let count = r.u32()? as usize;
        let expected = match kind {
            1 => 4,
            2 => 2,
            k => return Err(Error::Checkpoint(format!("unknown model kind {k}"))),
        };
        if count != expected {
            return Err(Error::Checkpoint(format!("expected {expected} layers, found {count}")));
        }
        let layers = (0..count).map(|_| r.dense()).collect::<Result<Vec<_>>>()?;
        if r.at != bytes.len() {
            return Err(Error::Checkpoint("trailing bytes".into()));
        }
        let chain = |a: &Dense, b: &Dense| a.outputs == b.inputs;
        let mut it = layers.into_iter();
        if kind == 1 {
            let [ph, po, rh, ro] = [it.next(), it.next(), it.next(), it.next()].map(Option::unwrap);
            let n = ph.inputs;
            if !(chain(&ph, &po) && chain(&po, &rh) && chain(&rh, &ro) && ro.outputs == n) {
                return Err(Error::Checkpoint("inconsistent DON layer shapes".into()));
            }
            let shape = DonShape {
                n,
                hidden_phi: ph.outputs,
                embed: po.outputs,
                hidden_rho: rh.outputs,
            };
            Ok(Checkpoint::Don(DonModel {
                shape,
                seed,
                phi_hidden: ph,
                phi_out: po,
                rho_hidden: rh,
                rho_out: ro,
            }))
        } else {
            let (hidden, out) = (it.next().unwrap(), it.next().unwrap());
            if !(chain(&hidden, &out) && out.outputs == hidden.inputs) {
                return Err(Error::Checkpoint("inconsistent policy layer shapes".into()));
            }
            Ok(Checkpoint::Policy(PolicyModel { seed, hidden, out }))
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes).map_err(|e| match e {
            Error::Checkpoint(msg) => Error::Checkpoint(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}

/// Loads a DON checkpoint, rejecting other kinds.
pub fn load_don(path: &Path) -> Result<DonModel> {
    match Checkpoint::load(path)? {
        Checkpoint::Don(m) => Ok(m),
        Checkpoint::Policy(_) => Err(Error::Checkpoint(format!(
            "{}: holds a policy model, expected DON",
            path.display()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::don::init_don;
    use crate::policy::init_policy;

    #[test]
    fn don_round_trip_is_bit_exact() {
        let mut m = init_don(7, 5, 4, 3, 11).unwrap();
        m.rho_out.bias[0] = -0.0;
        m.phi_out.weight[1] = f64::MIN_POSITIVE / 3.0;
        let back = Checkpoint::from_bytes(&Checkpoint::Don(m.clone()).to_bytes()).unwrap();
        let Checkpoint::Don(b) = back else { panic!("wrong kind") };
        for (x, y) in m.layer_list().iter().zip(b.layer_list()) {
            let bits = |d: &Dense| d.weight.iter().chain(&d.bias).map(|v| v.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(x), bits(y));
        }
        assert_eq!(b.shape, m.shape);
        assert_eq!(b.seed, 11);
    }

    #[test]
    fn policy_round_trip() {
        let m = init_policy(6, 4, 3).unwrap();
        let c = Checkpoint::Policy(m);
        assert_eq!(Checkpoint::from_bytes(&c.to_bytes()).unwrap(), c);
    }

    #[test]
    fn rejects_damage() {
        let bytes = Checkpoint::Don(init_don(4, 2, 2, 2, 0).unwrap()).to_bytes();
        assert!(Checkpoint::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(Checkpoint::from_bytes(&bad).is_err());
        let mut bad = bytes.clone();
        bad[8] = 9;
        assert!(Checkpoint::from_bytes(&bad).is_err());
        let mut extra = bytes;
        extra.push(0);
        assert!(Checkpoint::from_bytes(&extra).is_err());
    }
}
