//! Dense action-value table over all 4^8 egocentric states, and its binary file format.
//!
//! File layout (little endian):
//!
//! | offset | size            | content                                   |
//! |--------|-----------------|-------------------------------------------|
//! | 0      | 4               | magic `GHQT`                              |
//! | 4      | 2               | format version (`u16`, currently 1)       |
//! | 6      | 65536 * 3 * 8   | `f64` values, state-major, action-minor   |
//! | end-8  | 8               | `u64` wrapping sum of the payload bytes   |
//!
//! Action order within a state is confirm, left, right.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::wedge::{GuidanceAction, StateIndex, NUM_STATES};

pub const MAGIC: &[u8; 4] = b"GHQT";
pub const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 6;
const PAYLOAD_LEN: usize = NUM_STATES * 3 * 8;
pub const FILE_LEN: usize = HEADER_LEN + PAYLOAD_LEN + 8;

#[derive(Debug, Clone)]
pub struct QTable {
    values: Vec<[f64; 3]>,
    visits: Vec<[u32; 3]>,
}

impl Default for QTable {
    fn default() -> Self {
        Self::zeros()
    }
}

impl QTable {
    pub fn zeros() -> Self {
        Self::filled(0.0)
    }

    pub fn filled(v: f64) -> Self {
        QTable { values: vec![[v; 3]; NUM_STATES], visits: vec![[0; 3]; NUM_STATES] }
    }

    pub fn get(&self, s: StateIndex, a: GuidanceAction) -> f64 {
        self.values[s.get()][a.index()]
    }

    pub fn row(&self, s: StateIndex) -> [f64; 3] {
        self.values[s.get()]
    }

    pub fn set(&mut self, s: StateIndex, a: GuidanceAction, v: f64) {
        self.values[s.get()][a.index()] = v;
    }

    pub(crate) fn record_visit(&mut self, s: StateIndex, a: GuidanceAction) {
        let c = &mut self.visits[s.get()][a.index()];
        *c = c.saturating_add(1);
    }

    pub fn visits(&self, s: StateIndex, a: GuidanceAction) -> u32 {
        self.visits[s.get()][a.index()]
    }

    pub fn max_value(&self, s: StateIndex) -> f64 {
        let r = self.values[s.get()];
        r[0].max(r[1]).max(r[2])
    }

    /// Greedy action with ties broken confirm, left, right.
    pub fn greedy(&self, s: StateIndex) -> GuidanceAction {
        argmax_ordered(&self.values[s.get()])
    }

    pub fn values(&self) -> &[[f64; 3]] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().flatten().all(|v| v.is_finite())
    }

    /// Adds `c` to every entry.
    pub fn offset(&mut self, c: f64) {
        self.values.iter_mut().flatten().for_each(|v| *v += c);
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(FILE_LEN);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        for v in self.values.iter().flatten() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        let sum = checksum(&out[HEADER_LEN..]);
        out.extend_from_slice(&sum.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let fmt_err = |offset: usize, msg: &str| Error::QTableFormat { offset, msg: msg.to_string() };
        if bytes.len() < 4 {
            return Err(fmt_err(bytes.len(), "truncated before magic"));
        }
        if &bytes[..4] != MAGIC {
            return Err(fmt_err(0, "bad magic"));
        }
        if bytes.len() < HEADER_LEN {
            return Err(fmt_err(bytes.len(), "truncated before version"));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != FORMAT_VERSION {
            return Err(Error::QTableVersion { found: version, expected: FORMAT_VERSION });
        }
        if bytes.len() < FILE_LEN {
            return Err(fmt_err(bytes.len(), "truncated file"));
        }
        if bytes.len() > FILE_LEN {
            return Err(fmt_err(FILE_LEN, "trailing bytes"));
        }
        let payload = &bytes[HEADER_LEN..HEADER_LEN + PAYLOAD_LEN];
        let stored = u64::from_le_bytes(bytes[HEADER_LEN + PAYLOAD_LEN..].try_into().unwrap());
        if stored != checksum(payload) {
            return Err(fmt_err(HEADER_LEN + PAYLOAD_LEN, "checksum mismatch"));
        }
        let mut values = Vec::with_capacity(NUM_STATES);
        for (s, chunk) in payload.chunks_exact(24).enumerate() {
            let mut row = [0.0; 3];
            for (a, b) in chunk.chunks_exact(8).enumerate() {
                let v = f64::from_le_bytes(b.try_into().unwrap());
                if !v.is_finite() {
                    return Err(fmt_err(HEADER_LEN + s * 24 + a * 8, "non-finite value"));
                }
                row[a] = v;
            }
            values.push(row);
        }
        Ok(QTable { values, visits: vec![[0; 3]; NUM_STATES] })
    }
}

pub(crate) fn argmax_ordered(row: &[f64; 3]) -> GuidanceAction {
    let mut best = 0;
    for a in 1..3 {
        if row[a] > row[best] {
            best = a;
        }
    }
    GuidanceAction::from_index(best).unwrap()
}

fn checksum(payload: &[u8]) -> u64 {
    payload.iter().fold(0u64, |acc, &b| acc.wrapping_add(b as u64))
}

pub fn save_qtable(q: &QTable, path: &Path) -> Result<()> {
    let bytes = q.to_bytes();
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&bytes).map_err(|e| Error::io(path, e))
}

pub fn load_qtable(path: &Path) -> Result<QTable> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    QTable::from_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_table() -> QTable {
        let mut q = QTable::zeros();
        for s in StateIndex::all().step_by(331) {
            for a in GuidanceAction::ALL {
                q.set(s, a, (s.get() as f64).sin() * 100.0 + a.index() as f64);
            }
        }
        q
    }

    #[test]
    fn roundtrip_bit_exact() {
        let q = sample_table();
        let back = QTable::from_bytes(&q.to_bytes()).unwrap();
        let a: Vec<u64> = q.values().iter().flatten().map(|v| v.to_bits()).collect();
        let b: Vec<u64> = back.values().iter().flatten().map(|v| v.to_bits()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn layout() {
        let mut q = QTable::zeros();
        q.set(StateIndex::new(1).unwrap(), GuidanceAction::Left, 2.5);
        let bytes = q.to_bytes();
        assert_eq!(bytes.len(), FILE_LEN);
        assert_eq!(&bytes[..4], b"GHQT");
        assert_eq!(u16::from_le_bytes([bytes[4], bytes[5]]), 1);
        // state 1, action 1 lives at 6 + (1*3 + 1)*8
        let off = 6 + 4 * 8;
        assert_eq!(f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap()), 2.5);
    }

    #[test]
    fn truncated_is_rejected() {
        let bytes = sample_table().to_bytes();
        let err = QTable::from_bytes(&bytes[..1000]).unwrap_err();
        assert!(matches!(err, Error::QTableFormat { offset: 1000, .. }), "{err}");
        assert!(QTable::from_bytes(&bytes[..2]).is_err());
    }

    #[test]
    fn version_mismatch_is_explicit() {
        let mut bytes = sample_table().to_bytes();
        bytes[4] = 9;
        assert!(matches!(QTable::from_bytes(&bytes), Err(Error::QTableVersion { found: 9, expected: 1 })));
    }

    #[test]
    fn corruption_is_detected() {
        let mut bytes = sample_table().to_bytes();
        bytes[100] ^= 0x10;
        assert!(matches!(QTable::from_bytes(&bytes), Err(Error::QTableFormat { .. })));
        let mut bytes = sample_table().to_bytes();
        bytes[0] = b'X';
        assert!(matches!(QTable::from_bytes(&bytes), Err(Error::QTableFormat { offset: 0, .. })));
    }

    #[test]
    fn file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.bin");
        let q = sample_table();
        save_qtable(&q, &path).unwrap();
        let back = load_qtable(&path).unwrap();
        assert_eq!(q.values(), back.values());
    }

    #[test]
    fn greedy_tie_order() {
        assert_eq!(argmax_ordered(&[0.0, 0.0, 0.0]), GuidanceAction::Confirm);
        assert_eq!(argmax_ordered(&[-1.0, 2.0, 2.0]), GuidanceAction::Left);
        assert_eq!(argmax_ordered(&[-1.0, 2.0, 3.0]), GuidanceAction::Right);
    }
}
