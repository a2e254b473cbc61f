use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::{Activation, NetworkConfig, NetworkParams, NnError, Result};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"MORLCKPT";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Provenance stored next to the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointMetadata {
    /// Algorithm variant name.
    pub variant: String,
    /// Environment name.
    pub env: String,
    pub seed: u64,
    pub env_steps: u64,
    /// Discount the policy was trained with; evaluation reuses it.
    pub gamma: f64,
}

/// A network configuration, its parameters and training metadata.
///
/// Layout (little endian): magic, `u32` version, config
/// (`u64` input length, `u64` hidden count, `u64` per hidden size, `u8`
/// activation, `u64` actions, `u64` value dim, `u8` conditioned), metadata
/// (length-prefixed variant and env strings, `u64` seed, `u64` env steps,
/// `f64` gamma), `u64` parameter count, then the parameters as `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyCheckpoint {
    pub config: NetworkConfig,
    pub params: NetworkParams,
    pub metadata: CheckpointMetadata,
}

impl PolicyCheckpoint {
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let c = &self.config;
        out.write_all(CHECKPOINT_MAGIC)?;
        out.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
        put_u64(&mut out, c.input_length as u64)?;
        put_u64(&mut out, c.hidden_sizes.len() as u64)?;
        for &h in &c.hidden_sizes {
            put_u64(&mut out, h as u64)?;
        }
        out.write_all(&[match c.activation {
            Activation::Tanh => 0,
            Activation::Relu => 1,
        }])?;
        put_u64(&mut out, c.action_count as u64)?;
        put_u64(&mut out, c.value_dim as u64)?;
        out.write_all(&[c.condition_on_weights as u8])?;
        let m = &self.metadata;
        put_str(&mut out, &m.variant)?;
        put_str(&mut out, &m.env)?;
        put_u64(&mut out, m.seed)?;
        put_u64(&mut out, m.env_steps)?;
        out.write_all(&m.gamma.to_le_bytes())?;
        put_u64(&mut out, self.params.len() as u64)?;
        for p in self.params.as_slice() {
            out.write_all(&p.to_le_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if &magic != CHECKPOINT_MAGIC {
            return Err(NnError::Checkpoint("not a policy checkpoint (bad magic)".into()));
        }
        let mut v = [0u8; 4];
        input.read_exact(&mut v)?;
        let version = u32::from_le_bytes(v);
        if version != CHECKPOINT_VERSION {
            return Err(NnError::Checkpoint(format!("unsupported version {version}")));
        }
        let input_length = get_usize(&mut input)?;
        let hidden_count = get_usize(&mut input)?;
        if hidden_count > 1024 {
            return Err(NnError::Checkpoint(format!("implausible hidden layer count {hidden_count}")));
        }
        let hidden_sizes = (0..hidden_count).map(|_| get_usize(&mut input)).collect::<Result<Vec<_>>>()?;
        let activation = match get_u8(&mut input)? {
            0 => Activation::Tanh,
            1 => Activation::Relu,
            other => return Err(NnError::Checkpoint(format!("unknown activation tag {other}"))),
        };
        let action_count = get_usize(&mut input)?;
        let value_dim = get_usize(&mut input)?;
        let condition_on_weights = match get_u8(&mut input)? {
            0 => false,
            1 => true,
            other => return Err(NnError::Checkpoint(format!("bad conditioning flag {other}"))),
        };
        let config =
            NetworkConfig { input_length, hidden_sizes, activation, action_count, value_dim, condition_on_weights };
        config.validate()?;
        let metadata = CheckpointMetadata {
            variant: get_str(&mut input)?,
            env: get_str(&mut input)?,
            seed: get_u64(&mut input)?,
            env_steps: get_u64(&mut input)?,
            gamma: f64::from_le_bytes(get_array(&mut input)?),
        };
        let count = get_usize(&mut input)?;
        if count != config.param_count() {
            return Err(NnError::Checkpoint(format!(
                "{count} parameters stored, configuration needs {}",
                config.param_count()
            )));
        }
        let values = (0..count).map(|_| Ok(f64::from_le_bytes(get_array(&mut input)?))).collect::<Result<Vec<_>>>()?;
        let mut rest = [0u8; 1];
        if input.read(&mut rest)? != 0 {
            return Err(NnError::Checkpoint("trailing bytes after parameters".into()));
        }
        let params = NetworkParams::from_values(&config, values)?;
        Ok(Self { config, params, metadata })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

fn put_u64(out: &mut impl Write, x: u64) -> Result<()> {
    Ok(out.write_all(&x.to_le_bytes())?)
}

fn put_str(out: &mut impl Write, s: &str) -> Result<()> {
    out.write_all(&(s.len() as u32).to_le_bytes())?;
    Ok(out.write_all(s.as_bytes())?)
}

fn get_array<const N: usize>(input: &mut impl Read) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    input.read_exact(&mut b)?;
    Ok(b)
}

fn get_u8(input: &mut impl Read) -> Result<u8> {
    Ok(get_array::<1>(input)?[0])
}

fn get_u64(input: &mut impl Read) -> Result<u64> {
    Ok(u64::from_le_bytes(get_array(input)?))
}

fn get_usize(input: &mut impl Read) -> Result<usize> {
    let x = get_u64(input)?;
    usize::try_from(x).map_err(|_| NnError::Checkpoint(format!("value {x} does not fit in usize")))
}

fn get_str(input: &mut impl Read) -> Result<String> {
    let len = u32::from_le_bytes(get_array(input)?) as usize;
    if len > 4096 {
        return Err(NnError::Checkpoint(format!("implausible string length {len}")));
    }
    let mut b = vec![0u8; len];
    input.read_exact(&mut b)?;
    String::from_utf8(b).map_err(|e| NnError::Checkpoint(e.to_string()))
}
