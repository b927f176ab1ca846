//! Binary snapshots of the canonical ends born by a given day.
//!
//! Layout, all integers little-endian `u32`:
//!
//! ```text
//! "LDE1" day node_count
//! node_count × (k child_0 … child_{k-1})   children index earlier nodes
//! game_count game_0 … game_{m-1}           indices into the node table
//! ```
//!
//! The node table holds every subposition of the listed games, so a snapshot
//! can be loaded into any engine. Ids are remapped on load.

use std::collections::HashMap;
use std::io::{Read, Write};

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::store::EndId;

const MAGIC: &[u8; 4] = b"LDE1";

fn io_err(e: std::io::Error) -> Error {
    Error::Snapshot(e.to_string())
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf).map_err(io_err)?;
    Ok(u32::from_le_bytes(buf))
}

impl Engine {
    /// Writes the canonical ends born by day `day` (generating them if
    /// necessary is the caller's job) to `w`.
    pub fn write_snapshot(&self, day: u32, games: &[EndId], w: &mut impl Write) -> Result<()> {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<EndId> = games.to_vec();
        while let Some(g) = stack.pop() {
            if !std::mem::replace(&mut seen[g.index()], true) {
                stack.extend_from_slice(self.options(g));
            }
        }
        // Options are always interned before their parents, so id order is
        // a topological order.
        let nodes: Vec<EndId> = (0..self.len())
            .filter(|&i| seen[i])
            .map(|i| EndId(i as u32))
            .collect();
        let position: HashMap<EndId, u32> = nodes.iter().enumerate().map(|(i, &g)| (g, i as u32)).collect();

        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&day.to_le_bytes());
        out.extend_from_slice(&(nodes.len() as u32).to_le_bytes());
        for &g in &nodes {
            let opts = self.options(g);
            out.extend_from_slice(&(opts.len() as u32).to_le_bytes());
            for o in opts {
                out.extend_from_slice(&position[o].to_le_bytes());
            }
        }
        out.extend_from_slice(&(games.len() as u32).to_le_bytes());
        for g in games {
            out.extend_from_slice(&position[g].to_le_bytes());
        }
        w.write_all(&out).map_err(io_err)
    }

    /// Reads a snapshot, interning its nodes, and installs its games as the
    /// canonical ends born by its day. Returns the day and the games.
    pub fn read_snapshot(&mut self, r: &mut impl Read) -> Result<(u32, Vec<EndId>)> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(io_err)?;
        if &magic != MAGIC {
            return Err(Error::Snapshot(format!("bad magic {magic:?}")));
        }
        let day = read_u32(r)?;
        let count = read_u32(r)? as usize;
        let mut ids: Vec<EndId> = Vec::with_capacity(count.min(1 << 20));
        for i in 0..count {
            let k = read_u32(r)? as usize;
            let mut options = Vec::with_capacity(k.min(1 << 16));
            for _ in 0..k {
                let c = read_u32(r)? as usize;
                if c >= i {
                    return Err(Error::Snapshot(format!("node {i} refers forward to node {c}")));
                }
                options.push(ids[c]);
            }
            ids.push(self.intern_unsorted(options));
        }
        let m = read_u32(r)? as usize;
        let mut games = Vec::with_capacity(m.min(1 << 20));
        for _ in 0..m {
            let i = read_u32(r)? as usize;
            let g = *ids
                .get(i)
                .ok_or_else(|| Error::Snapshot(format!("game index {i} out of range")))?;
            if self.birthday(g) > day {
                return Err(Error::Snapshot(format!("game {i} is born after day {day}")));
            }
            if self.canonical(g) != g {
                return Err(Error::Snapshot(format!("game {i} is not in canonical form")));
            }
            games.push(g);
        }
        let mut rest = Vec::new();
        r.read_to_end(&mut rest).map_err(io_err)?;
        if !rest.is_empty() {
            return Err(Error::Snapshot(format!("{} trailing bytes", rest.len())));
        }
        games.sort_unstable();
        games.dedup();
        if self.generated_days() < day {
            self.install_day(day, &games);
        }
        Ok((day, games))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::Budget;
    use crate::notation::format;

    #[test]
    fn round_trip_into_fresh_engine() {
        let mut a = Engine::new();
        let b = Budget::default();
        let day = a.generate_day(3, &b, 1).unwrap();
        let mut bytes = Vec::new();
        a.write_snapshot(3, &day.games, &mut bytes).unwrap();
        assert_eq!(&bytes[..4], b"LDE1");

        let mut c = Engine::new();
        // Interning something first shifts every id.
        c.waiting(6);
        let (d, games) = c.read_snapshot(&mut bytes.as_slice()).unwrap();
        assert_eq!(d, 3);
        let mut left: Vec<String> = day.games.iter().map(|&g| format(&a, g)).collect();
        let mut right: Vec<String> = games.iter().map(|&g| format(&c, g)).collect();
        left.sort();
        right.sort();
        assert_eq!(left, right);
        assert_eq!(c.generate_day(2, &b, 1).unwrap().games.len(), 4);
        assert_eq!(c.generate_day(4, &b, 1).unwrap().games.len(), 52);
    }

    #[test]
    fn rejects_bad_input() {
        let mut e = Engine::new();
        assert!(matches!(e.read_snapshot(&mut &b"LDE2"[..]), Err(Error::Snapshot(_))));
        let mut forward = Vec::new();
        for v in [1u32, 1, 1, 1] {
            forward.extend_from_slice(&v.to_le_bytes());
        }
        let mut bytes = b"LDE1".to_vec();
        bytes.extend_from_slice(&forward);
        assert!(matches!(e.read_snapshot(&mut bytes.as_slice()), Err(Error::Snapshot(_))));
        // {·| 2̄, W2} is not canonical: 2̄ > W2.
        let mut bytes = b"LDE1".to_vec();
        for v in [3u32, 5, 0, 1, 0, 1, 1, 2, 0, 1, 2, 2, 3, 2, 1, 4] {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        assert!(matches!(e.read_snapshot(&mut bytes.as_slice()), Err(Error::Snapshot(_))));
    }
}
