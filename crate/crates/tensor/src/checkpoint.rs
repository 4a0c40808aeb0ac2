//! Binary checkpoint container for named tensors.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic     8 bytes  "SFCKPT\0\0"
//! version   u32      = 1
//! meta_len  u32      followed by meta_len bytes of UTF-8 metadata
//! count     u32      number of tensors
//! per tensor:
//!   name_len u32, name bytes (UTF-8)
//!   rank     u32, rank × u64 extents
//!   values   numel × f64 (IEEE-754 bits, little-endian)
//! ```
//!
//! Values are stored bit-for-bit, so a save/load round trip is exact.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Result, TensorError};
use crate::params::ParamStore;
use crate::tensor::Tensor;

const MAGIC: &[u8; 8] = b"SFCKPT\0\0";
pub const VERSION: u32 = 1;

pub fn write_checkpoint<W: Write>(mut w: W, store: &ParamStore, metadata: &str) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    write_bytes(&mut w, metadata.as_bytes())?;
    w.write_all(&(store.len() as u32).to_le_bytes())?;
    for (name, t) in store.iter() {
        write_bytes(&mut w, name.as_bytes())?;
        w.write_all(&(t.shape().len() as u32).to_le_bytes())?;
        for &d in t.shape() {
            w.write_all(&(d as u64).to_le_bytes())?;
        }
        let mut buf = Vec::with_capacity(t.numel() * 8);
        for v in t.data() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<(ParamStore, String)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(TensorError::Checkpoint("bad magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(TensorError::Checkpoint(format!(
            "unsupported version {version}"
        )));
    }
    let metadata = read_string(&mut r)?;
    let count = read_u32(&mut r)?;
    let mut store = ParamStore::new();
    for _ in 0..count {
        let name = read_string(&mut r)?;
        let rank = read_u32(&mut r)? as usize;
        let mut shape = Vec::with_capacity(rank);
        for _ in 0..rank {
            shape.push(read_u64(&mut r)? as usize);
        }
        let numel: usize = shape.iter().product();
        let mut raw = vec![0u8; numel * 8];
        r.read_exact(&mut raw)?;
        let data = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let t = Tensor::new(&shape, data)
            .map_err(|e| TensorError::Checkpoint(format!("tensor `{name}`: {e}")))?;
        if store.id_of(&name).is_some() {
            return Err(TensorError::Checkpoint(format!("duplicate tensor `{name}`")));
        }
        store.add(name, t);
    }
    Ok((store, metadata))
}

pub fn save(path: impl AsRef<Path>, store: &ParamStore, metadata: &str) -> Result<()> {
    let f = File::create(path)?;
    write_checkpoint(BufWriter::new(f), store, metadata)
}

pub fn load(path: impl AsRef<Path>) -> Result<(ParamStore, String)> {
    let f = File::open(path)?;
    read_checkpoint(BufReader::new(f))
}

fn write_bytes<W: Write>(w: &mut W, bytes: &[u8]) -> Result<()> {
    w.write_all(&(bytes.len() as u32).to_le_bytes())?;
    w.write_all(bytes)?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_string<R: Read>(r: &mut R) -> Result<String> {
    let len = read_u32(r)? as usize;
    let mut b = vec![0u8; len];
    r.read_exact(&mut b)?;
    String::from_utf8(b).map_err(|e| TensorError::Checkpoint(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_foreign_bytes() {
        let err = read_checkpoint(&b"NOTACKPTxxxxxxxx"[..]).unwrap_err();
        assert!(err.to_string().contains("bad magic"));
    }

    #[test]
    fn truncated_file_is_an_error() {
        let mut store = ParamStore::new();
        store.add("w", Tensor::zeros(&[4, 4]));
        let mut buf = Vec::new();
        write_checkpoint(&mut buf, &store, "{}").unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_checkpoint(&buf[..]).is_err());
    }
}
