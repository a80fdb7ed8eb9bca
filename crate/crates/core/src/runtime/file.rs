//! The `.spcc` controller file format.
//!
//! All integers are little-endian. Strings are a `u32` byte length followed
//! by UTF-8 bytes. Layout:
//!
//! ```text
//! magic "SPCC" | version u16 | spec name
//! variable count u32, then per variable:
//!     name | kind u8 (0 env, 1 sys) | type u8 (0 bool, 1 enum, 2 int)
//!     enum: value count u32, values | int: lo i64, hi i64
//!     bit width u32, kernel bit indices u32 each
//! memory bit count u32
//! node count u32, then 16-byte records (id, level, low, high) as u32;
//!     ids 0 and 1 are the terminals (level u32::MAX), children precede parents
//! roots u32: init, trans, initial assumptions, safety assumptions
//! assumption count u32, then per assumption:
//!     label | location | kind u8 (0 ini, 1 trans) | root u32
//! ```

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::bdd::{BddManager, BddRef, Level, VarId};
use crate::gr1::SymbolicController;
use crate::lowering::VarEncoding;
use crate::semcheck::types::Ty;
use crate::syntax::{TempKind, VarKind};

use super::{AssumptionInfo, Controller};

pub const MAGIC: &[u8; 4] = b"SPCC";
pub const FORMAT_VERSION: u16 = 1;

const TERMINAL: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LoadError {
    #[error("not a controller file (bad magic bytes)")]
    BadMagic,
    #[error("unsupported controller file version {found} (expected {FORMAT_VERSION})")]
    Version { found: u16 },
    #[error("controller file is truncated at byte {offset}")]
    Truncated { offset: usize },
    #[error("invalid UTF-8 string at byte {offset}")]
    Utf8 { offset: usize },
    #[error("invalid variable table: {0}")]
    Variables(String),
    #[error("node {node}: child {child} is not a previously defined node")]
    DanglingNode { node: u32, child: u32 },
    #[error("node {node}: {reason}")]
    BadNode { node: u32, reason: String },
    #[error("root id {0} is not a defined node")]
    BadRoot(u32),
    #[error("{0} unexpected bytes after the end of the controller")]
    TrailingBytes(usize),
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u16(&mut self, v: u16) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn i64(&mut self, v: i64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.0.extend_from_slice(s.as_bytes());
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], LoadError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or(LoadError::Truncated { offset: self.bytes.len() })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, LoadError> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16, LoadError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }
    fn u32(&mut self) -> Result<u32, LoadError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    fn i64(&mut self) -> Result<i64, LoadError> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn str(&mut self) -> Result<String, LoadError> {
        let len = self.u32()? as usize;
        let offset = self.pos;
        let raw = self.take(len)?;
        String::from_utf8(raw.to_vec()).map_err(|_| LoadError::Utf8 { offset })
    }
    /// A count of items each at least `min_size` bytes long.
    fn count(&mut self, min_size: usize) -> Result<usize, LoadError> {
        let n = self.u32()? as usize;
        if n.saturating_mul(min_size) > self.bytes.len() - self.pos {
            return Err(LoadError::Truncated { offset: self.bytes.len() });
        }
        Ok(n)
    }
}

/// Numbers the nodes reachable from `roots` children-first, starting at 2.
fn number_nodes(m: &BddManager, roots: &[BddRef]) -> (HashMap<BddRef, u32>, Vec<BddRef>) {
    let mut ids = HashMap::from([(BddRef::FALSE, 0), (BddRef::TRUE, 1)]);
    let mut order = Vec::new();
    for &root in roots {
        let mut stack = vec![(root, false)];
        while let Some((f, expanded)) = stack.pop() {
            if ids.contains_key(&f) {
                continue;
            }
            let (_, low, high) = m.children(f).expect("internal node");
            if expanded {
                ids.insert(f, order.len() as u32 + 2);
                order.push(f);
            } else {
                stack.push((f, true));
                stack.push((high, false));
                stack.push((low, false));
            }
        }
    }
    (ids, order)
}

/// Serializes a controller. Saving a loaded controller reproduces the
/// original bytes.
pub fn save(c: &Controller) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MAGIC);
    w.u16(FORMAT_VERSION);
    w.str(&c.name);
    w.u32(c.encodings.len() as u32);
    for e in &c.encodings {
        w.str(&e.name);
        w.u8(match e.kind {
            VarKind::Env => 0,
            VarKind::Sys => 1,
        });
        match &e.ty {
            Ty::Bool => w.u8(0),
            Ty::Enum(vals) => {
                w.u8(1);
                w.u32(vals.len() as u32);
                for v in vals.iter() {
                    w.str(v);
                }
            }
            Ty::Int { lo, hi } => {
                w.u8(2);
                w.i64(*lo);
                w.i64(*hi);
            }
        }
        w.u32(e.bits.len() as u32);
        for &b in &e.bits {
            w.u32(b);
        }
    }
    w.u32(c.symbolic.memory.len() as u32);

    let m = &c.symbolic.manager;
    let roots = c.roots();
    let (ids, order) = number_nodes(m, &roots);
    w.u32(order.len() as u32 + 2);
    for id in 0..2 {
        for v in [id, TERMINAL, id, id] {
            w.u32(v);
        }
    }
    for f in &order {
        let (level, low, high) = m.children(*f).expect("internal node");
        for v in [ids[f], level, ids[&low], ids[&high]] {
            w.u32(v);
        }
    }
    for r in [c.symbolic.init, c.symbolic.trans, c.symbolic.theta_e, c.symbolic.rho_e] {
        w.u32(ids[&r]);
    }
    w.u32(c.assumptions.len() as u32);
    for a in &c.assumptions {
        w.str(&a.label);
        w.str(&a.location);
        w.u8(match a.kind {
            TempKind::Ini => 0,
            _ => 1,
        });
        w.u32(ids[&a.bdd]);
    }
    w.0
}

fn read_encoding(r: &mut Reader<'_>) -> Result<VarEncoding, LoadError> {
    let name = r.str()?;
    let kind = match r.u8()? {
        0 => VarKind::Env,
        1 => VarKind::Sys,
        k => return Err(LoadError::Variables(format!("variable `{name}` has unknown kind {k}"))),
    };
    let ty = match r.u8()? {
        0 => Ty::Bool,
        1 => {
            let n = r.count(4)?;
            let vals = (0..n).map(|_| r.str()).collect::<Result<Vec<_>, _>>()?;
            if vals.is_empty() {
                return Err(LoadError::Variables(format!("enum variable `{name}` has no values")));
            }
            Ty::Enum(Arc::from(vals))
        }
        2 => {
            let (lo, hi) = (r.i64()?, r.i64()?);
            if lo > hi {
                return Err(LoadError::Variables(format!("int variable `{name}` has empty range")));
            }
            Ty::Int { lo, hi }
        }
        t => return Err(LoadError::Variables(format!("variable `{name}` has unknown type tag {t}"))),
    };
    let width = r.count(4)?;
    let bits = (0..width).map(|_| r.u32()).collect::<Result<Vec<_>, _>>()?;
    if width as u32 != ty.bit_width() {
        return Err(LoadError::Variables(format!(
            "variable `{name}` has {width} bits, its type needs {}",
            ty.bit_width()
        )));
    }
    Ok(VarEncoding { name, kind, ty, bits })
}

/// Reads a controller file.
pub fn load(bytes: &[u8]) -> Result<Controller, LoadError> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4).map_err(|_| LoadError::BadMagic)? != MAGIC {
        return Err(LoadError::BadMagic);
    }
    let version = r.u16()?;
    if version != FORMAT_VERSION {
        return Err(LoadError::Version { found: version });
    }
    let name = r.str()?;
    let var_count = r.count(14)?;
    let encodings = (0..var_count)
        .map(|_| read_encoding(&mut r))
        .collect::<Result<Vec<_>, _>>()?;
    let kernel_vars: usize = encodings.iter().map(|e| e.bits.len()).sum();
    let mut owner = vec![None; kernel_vars];
    for (i, e) in encodings.iter().enumerate() {
        for &b in &e.bits {
            match owner.get_mut(b as usize) {
                Some(slot @ None) => *slot = Some(i),
                _ => {
                    return Err(LoadError::Variables(format!(
                        "bit {b} of `{}` is out of range or shared",
                        e.name
                    )))
                }
            }
        }
    }
    let memory_bits = r.u32()?;
    if memory_bits > 32 {
        return Err(LoadError::Variables(format!("{memory_bits} memory bits")));
    }

    let mut m = BddManager::new();
    for _ in 0..kernel_vars + memory_bits as usize {
        m.new_var();
    }
    let vars_of = |kind: VarKind| -> Vec<VarId> {
        (0..kernel_vars)
            .filter(|&b| encodings[owner[b].expect("every bit has an owner")].kind == kind)
            .map(|b| VarId(b as u32))
            .collect()
    };
    let env = vars_of(VarKind::Env);
    let sys = vars_of(VarKind::Sys);
    let memory: Vec<VarId> = (0..memory_bits).map(|k| VarId(kernel_vars as u32 + k)).collect();

    let node_count = r.count(16)?;
    if node_count < 2 {
        return Err(LoadError::BadNode { node: node_count as u32, reason: "terminal records missing".into() });
    }
    let mut refs: Vec<BddRef> = Vec::with_capacity(node_count);
    let mut seen = HashSet::new();
    for id in 0..node_count as u32 {
        let (rid, level, low, high) = (r.u32()?, r.u32()?, r.u32()?, r.u32()?);
        let bad = |reason: &str| LoadError::BadNode { node: rid, reason: reason.to_string() };
        if rid != id {
            return Err(bad(&format!("expected id {id}")));
        }
        if id < 2 {
            if level != TERMINAL || low != id || high != id {
                return Err(bad("malformed terminal record"));
            }
            refs.push(if id == 0 { BddRef::FALSE } else { BddRef::TRUE });
            continue;
        }
        for child in [low, high] {
            if child >= id {
                return Err(LoadError::DanglingNode { node: id, child });
            }
        }
        if low == high {
            return Err(bad("both children are equal"));
        }
        let node = m
            .mk(level as Level, refs[low as usize], refs[high as usize])
            .ok_or_else(|| bad("level out of range or not above its children"))?;
        if !seen.insert(node) {
            return Err(bad("duplicate of an earlier node"));
        }
        refs.push(node);
    }
    let root = |r: &mut Reader<'_>| -> Result<BddRef, LoadError> {
        let id = r.u32()?;
        refs.get(id as usize).copied().ok_or(LoadError::BadRoot(id))
    };
    let init = root(&mut r)?;
    let trans = root(&mut r)?;
    let theta_e = root(&mut r)?;
    let rho_e = root(&mut r)?;
    let count = r.count(13)?;
    let mut assumptions = Vec::with_capacity(count);
    for _ in 0..count {
        let label = r.str()?;
        let location = r.str()?;
        let kind = match r.u8()? {
            0 => TempKind::Ini,
            1 => TempKind::Trans,
            k => return Err(LoadError::Variables(format!("assumption `{label}` has unknown kind {k}"))),
        };
        let bdd = root(&mut r)?;
        assumptions.push(AssumptionInfo { label, location, kind, bdd });
    }
    if r.pos != bytes.len() {
        return Err(LoadError::TrailingBytes(bytes.len() - r.pos));
    }
    Ok(Controller {
        name,
        encodings,
        assumptions,
        symbolic: SymbolicController { manager: m, env, sys, memory, theta_e, rho_e, init, trans },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lowering::lower;
    use crate::semcheck::check;
    use crate::syntax::parse;

    fn controller(src: &str) -> Controller {
        let kernel = lower(&check(parse(src).unwrap()).unwrap()).unwrap();
        Controller::synthesize(&kernel, None).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let c = controller(
            "spec A env {L, M, R} d; sys Int(0..5) n; asm trans d = L -> next(d != R); \
             gar alw n < 3; gar alwEv n = 2; gar alwEv d = M -> n = 0;",
        );
        let bytes = save(&c);
        let loaded = load(&bytes).unwrap();
        assert_eq!(save(&loaded), bytes);
        assert_eq!(loaded.encodings, c.encodings);
        assert_eq!(loaded.symbolic.memory.len(), 1);
        assert_eq!(loaded.assumptions.len(), c.assumptions.len());
    }

    #[test]
    fn load_errors() {
        let bytes = save(&controller("spec A env boolean x; sys boolean y; gar alw y <-> x;"));
        assert_eq!(load(b"XXXX").unwrap_err(), LoadError::BadMagic);
        let mut v = bytes.clone();
        v[4] = 9;
        assert_eq!(load(&v).unwrap_err(), LoadError::Version { found: 9 });
        assert!(matches!(load(&bytes[..bytes.len() - 3]), Err(LoadError::Truncated { .. })));
        let mut extra = bytes.clone();
        extra.push(0);
        assert_eq!(load(&extra).unwrap_err(), LoadError::TrailingBytes(1));
    }
}
