use std::path::Path;

use super::{NetworkSpec, NnError, ParameterSet};

const MAGIC: &[u8; 4] = b"FRQN";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Binary dump: magic, version, spec header, parameter count, then every
/// parameter as little-endian f64.
pub fn encode_params(params: &ParameterSet, out: &mut Vec<u8>) {
    let spec = params.spec();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    for v in [
        spec.input_channels,
        spec.grid,
        spec.outputs,
        spec.conv_widths.len(),
    ] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    for &w in &spec.conv_widths {
        out.extend_from_slice(&(w as u32).to_le_bytes());
    }
    out.extend_from_slice(&spec.slope.to_le_bytes());
    out.extend_from_slice(&(params.len() as u64).to_le_bytes());
    for v in params.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

/// Reads one parameter set from the front of `input`, advancing it.
pub fn decode_params(input: &mut &[u8]) -> Result<ParameterSet, NnError> {
    if take(input, 4)? != MAGIC {
        return Err(NnError::Checkpoint("bad magic".into()));
    }
    let version = u32_le(input)?;
    if version != CHECKPOINT_VERSION {
        return Err(NnError::Checkpoint(format!(
            "unsupported version {version}"
        )));
    }
    let input_channels = u32_le(input)? as usize;
    let grid = u32_le(input)? as usize;
    let outputs = u32_le(input)? as usize;
    let convs = u32_le(input)? as usize;
    if convs > 64 {
        return Err(NnError::Checkpoint(format!(
            "implausible layer count {convs}"
        )));
    }
    let conv_widths = (0..convs)
        .map(|_| u32_le(input).map(|w| w as usize))
        .collect::<Result<_, _>>()?;
    let slope = f64::from_le_bytes(take(input, 8)?.try_into().expect("8 bytes"));
    let spec = NetworkSpec {
        input_channels,
        grid,
        conv_widths,
        outputs,
        slope,
    };
    spec.validate()?;
    let count = u64::from_le_bytes(take(input, 8)?.try_into().expect("8 bytes")) as usize;
    if count != spec.param_count() {
        return Err(NnError::Checkpoint(format!(
            "{count} parameters for a spec needing {}",
            spec.param_count()
        )));
    }
    let raw = take(input, count * 8)?;
    let values = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    ParameterSet::from_values(&spec, values)
}

pub fn save_params(path: &Path, params: &ParameterSet) -> Result<(), NnError> {
    let mut buf = Vec::new();
    encode_params(params, &mut buf);
    std::fs::write(path, buf).map_err(|e| NnError::Checkpoint(format!("{}: {e}", path.display())))
}

pub fn load_params(path: &Path) -> Result<ParameterSet, NnError> {
    let bytes =
        std::fs::read(path).map_err(|e| NnError::Checkpoint(format!("{}: {e}", path.display())))?;
    let mut cursor = bytes.as_slice();
    let params = decode_params(&mut cursor)?;
    if !cursor.is_empty() {
        return Err(NnError::Checkpoint(format!(
            "{} trailing bytes",
            cursor.len()
        )));
    }
    Ok(params)
}

fn take<'a>(input: &mut &'a [u8], n: usize) -> Result<&'a [u8], NnError> {
    if input.len() < n {
        return Err(NnError::Checkpoint("truncated checkpoint".into()));
    }
    let (head, tail) = input.split_at(n);
    *input = tail;
    Ok(head)
}

fn u32_le(input: &mut &[u8]) -> Result<u32, NnError> {
    Ok(u32::from_le_bytes(
        take(input, 4)?.try_into().expect("4 bytes"),
    ))
}
