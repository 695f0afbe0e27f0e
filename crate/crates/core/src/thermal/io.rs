use std::io::{BufRead, Read, Write};

use crate::{bits_from_str, bits_to_string, Bit, Error, Result};

/// Packed form: a little-endian `u64` bit count, then 8 bits per byte,
/// least significant bit first.
pub fn write_packed(mut out: impl Write, bits: &[Bit]) -> Result<()> {
    out.write_all(&(bits.len() as u64).to_le_bytes())?;
    for chunk in bits.chunks(8) {
        let byte = chunk.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (b as u8) << i);
        out.write_all(&[byte])?;
    }
    Ok(())
}

pub fn read_packed(mut input: impl Read) -> Result<Vec<Bit>> {
    let mut header = [0u8; 8];
    input.read_exact(&mut header)?;
    let n = u64::from_le_bytes(header) as usize;
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() != n.div_ceil(8) {
        return Err(Error::InvalidParameter(format!("packed stream holds {} bytes for {n} bits", bytes.len())));
    }
    Ok((0..n).map(|i| bytes[i / 8] >> (i % 8) & 1 == 1).collect())
}

/// ASCII form: `0`/`1` characters, `width` per line.
pub fn write_ascii(mut out: impl Write, bits: &[Bit], width: usize) -> Result<()> {
    for chunk in bits.chunks(width.max(1)) {
        writeln!(out, "{}", bits_to_string(chunk))?;
    }
    Ok(())
}

pub fn read_ascii(input: impl BufRead) -> Result<Vec<Bit>> {
    let mut bits = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        bits.extend(bits_from_str(&line).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?);
    }
    Ok(bits)
}
