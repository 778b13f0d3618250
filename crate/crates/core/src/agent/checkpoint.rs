use std::path::Path;

use crate::graph::{NodeId, Topology};
use crate::nn::{decode_params, encode_params, NnError};

use super::{AgentError, Policies, Task};

const MAGIC: &[u8; 4] = b"FRAG";
const VERSION: u32 = 1;

/// Trained policies together with the task and topology they were trained on.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentCheckpoint {
    pub topology_hash: String,
    pub task: Task,
    pub policies: Policies,
}

impl AgentCheckpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.topology_hash.len() as u32).to_le_bytes());
        out.extend_from_slice(self.topology_hash.as_bytes());
        out.extend_from_slice(&self.task.source.0.to_le_bytes());
        out.extend_from_slice(&(self.task.destinations.len() as u32).to_le_bytes());
        for d in &self.task.destinations {
            out.extend_from_slice(&d.0.to_le_bytes());
        }
        encode_params(&self.policies.intrinsic, &mut out);
        encode_params(&self.policies.meta, &mut out);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AgentError> {
        let mut input = bytes;
        if take(&mut input, 4)? != MAGIC {
            return Err(corrupt("bad magic"));
        }
        let version = u32_le(&mut input)?;
        if version != VERSION {
            return Err(corrupt(&format!("unsupported version {version}")));
        }
        let hash_len = u32_le(&mut input)? as usize;
        let topology_hash = String::from_utf8(take(&mut input, hash_len)?.to_vec())
            .map_err(|_| corrupt("hash is not utf-8"))?;
        let source = NodeId(u32_le(&mut input)?);
        let count = u32_le(&mut input)? as usize;
        if count > input.len() / 4 {
            return Err(corrupt("destination count exceeds file"));
        }
        let destinations = (0..count)
            .map(|_| u32_le(&mut input).map(NodeId))
            .collect::<Result<_, _>>()?;
        let intrinsic = decode_params(&mut input)?;
        let meta = decode_params(&mut input)?;
        if !input.is_empty() {
            return Err(corrupt(&format!("{} trailing bytes", input.len())));
        }
        Ok(AgentCheckpoint {
            topology_hash,
            task: Task {
                source,
                destinations,
            },
            policies: Policies { intrinsic, meta },
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), AgentError> {
        std::fs::write(path, self.to_bytes())
            .map_err(|e| AgentError::Io(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self, AgentError> {
        let bytes =
            std::fs::read(path).map_err(|e| AgentError::Io(format!("{}: {e}", path.display())))?;
        Self::from_bytes(&bytes)
    }

    /// Errors unless the checkpoint was trained on `topo`.
    pub fn check_topology(&self, topo: &Topology) -> Result<(), AgentError> {
        let hash = topo.content_hash();
        if hash != self.topology_hash {
            return Err(AgentError::TopologyMismatch {
                expected: self.topology_hash.clone(),
                found: hash,
            });
        }
        Ok(())
    }
}

fn corrupt(msg: &str) -> AgentError {
    AgentError::Nn(NnError::Checkpoint(msg.to_string()))
}

fn take<'a>(input: &mut &'a [u8], n: usize) -> Result<&'a [u8], AgentError> {
    if input.len() < n {
        return Err(corrupt("truncated checkpoint"));
    }
    let (head, tail) = input.split_at(n);
    *input = tail;
    Ok(head)
}

fn u32_le(input: &mut &[u8]) -> Result<u32, AgentError> {
    Ok(u32::from_le_bytes(
        take(input, 4)?.try_into().expect("4 bytes"),
    ))
}
