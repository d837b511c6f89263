//! File formats: the TNS1 dense-tensor container, observation masks, binary
//! PPM (P6) images, and tensor-ring chain bundles.
//!
//! TNS1 is one ASCII header line `TNS1 <N> <I1> ... <IN>\n` followed by the
//! ∏Iₙ entries as little-endian IEEE f64 in column-major order. Masks use
//! the same container with every value exactly 0.0 or 1.0.

use crate::error::{Error, Result};
use crate::tensor::{Mask, Tensor};
use crate::tr::TRChain;
use std::fs;
use std::io::Write as _;
use std::path::Path;

fn encode_tensor(t: &Tensor, out: &mut Vec<u8>) {
    let dims: Vec<String> = t.dims().iter().map(|d| d.to_string()).collect();
    out.extend_from_slice(format!("TNS1 {} {}\n", t.order(), dims.join(" ")).as_bytes());
    for v in t.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

/// Parse one TNS1 block starting at `at`; returns the tensor and the offset
/// one past its last byte.
fn decode_tensor(path: &Path, bytes: &[u8], at: usize) -> Result<(Tensor, usize)> {
    let head_end = bytes[at..]
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::parse(path, "missing TNS1 header line"))?
        + at;
    let header = std::str::from_utf8(&bytes[at..head_end])
        .map_err(|_| Error::parse(path, "header is not ASCII"))?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("TNS1") {
        return Err(Error::parse(path, "missing TNS1 magic"));
    }
    let order: usize = fields
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(path, "bad order field"))?;
    let dims: Vec<usize> = fields
        .map(|s| s.parse::<usize>().map_err(|_| Error::parse(path, format!("bad dim '{s}'"))))
        .collect::<Result<_>>()?;
    if dims.len() != order || order == 0 || dims.iter().any(|&d| d == 0) {
        return Err(Error::parse(path, format!("inconsistent header dims {dims:?} for order {order}")));
    }
    let numel: usize = dims.iter().product();
    let start = head_end + 1;
    let end = start + 8 * numel;
    if bytes.len() < end {
        return Err(Error::parse(
            path,
            format!("payload truncated: need {} bytes, have {}", 8 * numel, bytes.len() - start),
        ));
    }
    let data: Vec<f64> = bytes[start..end]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok((Tensor::new(dims, data)?, end))
}

pub fn save_tensor(path: impl AsRef<Path>, t: &Tensor) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::with_capacity(32 + 8 * t.numel());
    encode_tensor(t, &mut out);
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn load_tensor(path: impl AsRef<Path>) -> Result<Tensor> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let (t, end) = decode_tensor(path, &bytes, 0)?;
    if end != bytes.len() {
        return Err(Error::parse(path, format!("{} trailing bytes", bytes.len() - end)));
    }
    Ok(t)
}

pub fn save_mask(path: impl AsRef<Path>, mask: &Mask) -> Result<()> {
    let data = mask.flags().iter().map(|&f| if f { 1.0 } else { 0.0 }).collect();
    save_tensor(path, &Tensor::new(mask.dims().to_vec(), data)?)
}

/// Load a mask container, insisting every entry is exactly 0.0 or 1.0.
pub fn load_mask(path: impl AsRef<Path>) -> Result<Mask> {
    let path = path.as_ref();
    let t = load_tensor(path)?;
    let mut flags = Vec::with_capacity(t.numel());
    for &v in t.data() {
        if v == 1.0 {
            flags.push(true);
        } else if v == 0.0 {
            flags.push(false);
        } else {
            return Err(Error::parse(path, format!("mask value {v} is not 0.0/1.0")));
        }
    }
    Mask::new(t.dims().to_vec(), flags)
}

/// Skip PPM whitespace and `#` comment lines, returning the next token.
fn ppm_token<'a>(path: &Path, bytes: &'a [u8], pos: &mut usize) -> Result<&'a str> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::parse(path, "unexpected end of PPM header"));
    }
    std::str::from_utf8(&bytes[start..*pos]).map_err(|_| Error::parse(path, "non-ASCII PPM header"))
}

/// Binary PPM (P6, maxval 255) as an H×W×3 tensor, channel on mode 3.
pub fn load_image(path: impl AsRef<Path>) -> Result<Tensor> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut pos = 0usize;
    if ppm_token(path, &bytes, &mut pos)? != "P6" {
        return Err(Error::parse(path, "not a P6 PPM"));
    }
    let w: usize = ppm_token(path, &bytes, &mut pos)?
        .parse()
        .map_err(|_| Error::parse(path, "bad width"))?;
    let h: usize = ppm_token(path, &bytes, &mut pos)?
        .parse()
        .map_err(|_| Error::parse(path, "bad height"))?;
    let maxval: usize = ppm_token(path, &bytes, &mut pos)?
        .parse()
        .map_err(|_| Error::parse(path, "bad maxval"))?;
    if maxval != 255 {
        return Err(Error::parse(path, format!("unsupported maxval {maxval} (only 255)")));
    }
    pos += 1; // single whitespace byte after maxval
    let need = 3 * w * h;
    if bytes.len() < pos + need {
        return Err(Error::parse(path, "pixel payload truncated"));
    }
    if w == 0 || h == 0 {
        return Err(Error::parse(path, "empty image"));
    }
    let px = &bytes[pos..pos + need];
    let mut t = Tensor::zeros(vec![h, w, 3]);
    let data = t.data_mut();
    for i in 0..h {
        for j in 0..w {
            for c in 0..3 {
                // PPM raster order: row-major pixels, interleaved channels
                data[i + j * h + c * h * w] = px[3 * (i * w + j) + c] as f64;
            }
        }
    }
    Ok(t)
}

/// Write an H×W×3 tensor as P6; values clamped to [0,255] and rounded
/// half-up.
pub fn save_image(path: impl AsRef<Path>, t: &Tensor) -> Result<()> {
    let path = path.as_ref();
    if t.order() != 3 || t.dims()[2] != 3 {
        return Err(Error::DimMismatch(format!("PPM needs H×W×3, got {:?}", t.dims())));
    }
    let (h, w) = (t.dims()[0], t.dims()[1]);
    let mut out = Vec::with_capacity(32 + 3 * h * w);
    out.extend_from_slice(format!("P6\n{w} {h}\n255\n").as_bytes());
    let data = t.data();
    for i in 0..h {
        for j in 0..w {
            for c in 0..3 {
                let v = data[i + j * h + c * h * w].clamp(0.0, 255.0);
                out.push((v + 0.5).floor() as u8);
            }
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Chain bundle: an ASCII manifest (order, dims, ranks) followed by each
/// core as its own TNS1 block.
pub fn save_chain(path: impl AsRef<Path>, chain: &TRChain) -> Result<()> {
    let path = path.as_ref();
    let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = Vec::new();
    out.extend_from_slice(
        format!(
            "TRCHAIN {}\ndims {}\nranks {}\n",
            chain.len(),
            join(&chain.dims()),
            join(&chain.ranks())
        )
        .as_bytes(),
    );
    for core in chain.cores() {
        encode_tensor(core, &mut out);
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn load_chain(path: impl AsRef<Path>) -> Result<TRChain> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut pos = 0usize;
    let mut line = |label: &str| -> Result<Vec<usize>> {
        let end = bytes[pos..]
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::parse(path, "truncated manifest"))?
            + pos;
        let text = std::str::from_utf8(&bytes[pos..end])
            .map_err(|_| Error::parse(path, "manifest not ASCII"))?;
        pos = end + 1;
        let mut fields = text.split_whitespace();
        let head = fields.next().unwrap_or("");
        if head != label {
            return Err(Error::parse(path, format!("expected '{label}', got '{head}'")));
        }
        fields
            .map(|s| s.parse::<usize>().map_err(|_| Error::parse(path, format!("bad number '{s}'"))))
            .collect()
    };
    let order = line("TRCHAIN")?;
    if order.len() != 1 {
        return Err(Error::parse(path, "TRCHAIN line needs exactly the core count"));
    }
    let n = order[0];
    let dims = line("dims")?;
    let ranks = line("ranks")?;
    if dims.len() != n || ranks.len() != n {
        return Err(Error::parse(path, "manifest dims/ranks length mismatch"));
    }
    let mut cores = Vec::with_capacity(n);
    for _ in 0..n {
        let (core, next) = decode_tensor(path, &bytes, pos)?;
        cores.push(core);
        pos = next;
    }
    if pos != bytes.len() {
        return Err(Error::parse(path, "trailing bytes after last core"));
    }
    let chain = TRChain::new(cores)?;
    if chain.dims() != dims || chain.ranks() != ranks {
        return Err(Error::parse(path, "cores disagree with manifest"));
    }
    Ok(chain)
}

/// Write CSV lines (header first) to a file, one string per row.
pub fn write_csv(path: impl AsRef<Path>, header: &str, rows: &[String]) -> Result<()> {
    let path = path.as_ref();
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut text = String::with_capacity(rows.len() * 64 + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}
