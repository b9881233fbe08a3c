//! Motion-vector payload codec and the `.ofv` stream container.
//!
//! A record is six little-endian 16-bit fields in the order
//! `x_prev, y_prev, dx, dy, best_score, second_score` (12 bytes). Records
//! travel in lines of 16; the last line of a frame is padded with
//! all-`0xFFFF` sentinel records.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::matcher::FlowVector;

pub const RECORD_BYTES: usize = 12;
pub const VECTORS_PER_LINE: usize = 16;
pub const LINE_BYTES: usize = RECORD_BYTES * VECTORS_PER_LINE;

/// Coordinates must fit the 11-bit sensor range.
pub const COORD_LIMIT: u32 = 2048;
pub const SCORE_LIMIT: u16 = 256;

const SENTINEL: [u8; RECORD_BYTES] = [0xFF; RECORD_BYTES];

pub const STREAM_MAGIC: &[u8; 4] = b"OFV1";

fn check_vector(v: &FlowVector) -> Result<()> {
    let fail = |field, value| Err(Error::Encode { field, value });
    if v.x_prev >= COORD_LIMIT {
        return fail("x_prev", v.x_prev as i64);
    }
    if v.y_prev >= COORD_LIMIT {
        return fail("y_prev", v.y_prev as i64);
    }
    if i16::try_from(v.dx).is_err() {
        return fail("dx", v.dx as i64);
    }
    if i16::try_from(v.dy).is_err() {
        return fail("dy", v.dy as i64);
    }
    if v.best_score > SCORE_LIMIT {
        return fail("best_score", v.best_score as i64);
    }
    if v.second_score > SCORE_LIMIT {
        return fail("second_score", v.second_score as i64);
    }
    Ok(())
}

/// Number of lines needed for `n` vectors.
pub fn line_count(n: usize) -> usize {
    n.div_ceil(VECTORS_PER_LINE)
}

/// Packs vectors into whole 192-byte lines.
pub fn encode(vectors: &[FlowVector]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(line_count(vectors.len()) * LINE_BYTES);
    encode_into(vectors, &mut out)?;
    Ok(out)
}

pub fn encode_into(vectors: &[FlowVector], out: &mut Vec<u8>) -> Result<()> {
    for v in vectors {
        check_vector(v)?;
        for field in [
            v.x_prev as u16,
            v.y_prev as u16,
            v.dx as i16 as u16,
            v.dy as i16 as u16,
            v.best_score,
            v.second_score,
        ] {
            out.extend_from_slice(&field.to_le_bytes());
        }
    }
    let padding = line_count(vectors.len()) * VECTORS_PER_LINE - vectors.len();
    for _ in 0..padding {
        out.extend_from_slice(&SENTINEL);
    }
    Ok(())
}

/// Unpacks whole lines, dropping sentinel records.
pub fn decode(bytes: &[u8]) -> Result<Vec<FlowVector>> {
    if !bytes.len().is_multiple_of(LINE_BYTES) {
        return Err(Error::Framing(bytes.len()));
    }
    let mut out = Vec::with_capacity(bytes.len() / RECORD_BYTES);
    for (i, rec) in bytes.chunks_exact(RECORD_BYTES).enumerate() {
        if rec == SENTINEL {
            continue;
        }
        let f = |k: usize| u16::from_le_bytes([rec[2 * k], rec[2 * k + 1]]);
        let v = FlowVector {
            x_prev: f(0) as u32,
            y_prev: f(1) as u32,
            dx: f(2) as i16 as i32,
            dy: f(3) as i16 as i32,
            best_score: f(4),
            second_score: f(5),
        };
        check_vector(&v).map_err(|e| Error::Payload(format!("record {i}: {e}")))?;
        out.push(v);
    }
    Ok(out)
}

/// Header of an `.ofv` stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamHeader {
    pub width: u32,
    pub height: u32,
    pub frame_count: u32,
}

/// Writes a complete `.ofv` stream: header then one block per frame.
pub fn write_stream<W: Write>(
    mut w: W,
    width: u32,
    height: u32,
    frames: &[Vec<FlowVector>],
) -> Result<()> {
    w.write_all(STREAM_MAGIC)?;
    for v in [width, height, frames.len() as u32] {
        w.write_all(&v.to_le_bytes())?;
    }
    let mut block = Vec::new();
    for vectors in frames {
        block.clear();
        encode_into(vectors, &mut block)?;
        w.write_all(&(line_count(vectors.len()) as u32).to_le_bytes())?;
        w.write_all(&block)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_stream<R: Read>(mut r: R) -> Result<(StreamHeader, Vec<Vec<FlowVector>>)> {
    let bad = |detail: String| Error::Format {
        what: ".ofv stream",
        detail,
    };
    let mut head = [0u8; 16];
    r.read_exact(&mut head)
        .map_err(|_| bad("truncated header".into()))?;
    if &head[..4] != STREAM_MAGIC {
        return Err(bad("missing OFV1 magic".into()));
    }
    let word = |k: usize| u32::from_le_bytes(head[4 * k..4 * k + 4].try_into().unwrap());
    let header = StreamHeader {
        width: word(1),
        height: word(2),
        frame_count: word(3),
    };
    let mut frames = Vec::with_capacity(header.frame_count as usize);
    for f in 0..header.frame_count {
        let mut n = [0u8; 4];
        r.read_exact(&mut n)
            .map_err(|_| bad(format!("frame {f}: missing line count")))?;
        let lines = u32::from_le_bytes(n) as usize;
        let mut payload = vec![0u8; lines * LINE_BYTES];
        r.read_exact(&mut payload)
            .map_err(|_| bad(format!("frame {f}: expected {lines} lines")))?;
        frames.push(decode(&payload)?);
    }
    Ok((header, frames))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x_prev: u32, y_prev: u32, dx: i32, dy: i32, best: u16, second: u16) -> FlowVector {
        FlowVector {
            x_prev,
            y_prev,
            dx,
            dy,
            best_score: best,
            second_score: second,
        }
    }

    #[test]
    fn empty_input_is_empty_stream() {
        assert!(encode(&[]).unwrap().is_empty());
        assert!(decode(&[]).unwrap().is_empty());
    }

    #[test]
    fn record_layout_is_little_endian() {
        let bytes = encode(&[v(5, 7, -1, 0, 3, 9)]).unwrap();
        assert_eq!(
            &bytes[..12],
            &[0x05, 0x00, 0x07, 0x00, 0xFF, 0xFF, 0x00, 0x00, 0x03, 0x00, 0x09, 0x00]
        );
        assert_eq!(bytes.len(), LINE_BYTES);
        assert!(bytes[12..].iter().all(|&b| b == 0xFF));
    }

    #[test]
    fn twenty_vectors_fill_two_lines() {
        let vs: Vec<FlowVector> = (0..20)
            .map(|i| v(i, 2 * i, i as i32 - 10, 3, i as u16, 200))
            .collect();
        let bytes = encode(&vs).unwrap();
        assert_eq!(bytes.len(), 384);
        assert!(bytes[20 * RECORD_BYTES..].iter().all(|&b| b == 0xFF));
        assert_eq!(decode(&bytes).unwrap(), vs);
    }

    #[test]
    fn all_sentinel_line_decodes_empty() {
        assert!(decode(&[0xFF; LINE_BYTES]).unwrap().is_empty());
    }

    #[test]
    fn framing_and_payload_errors() {
        assert!(matches!(decode(&[0u8; 100]), Err(Error::Framing(100))));
        let mut bytes = encode(&[v(1, 1, 0, 0, 0, 0)]).unwrap();
        bytes[8] = 0x01;
        bytes[9] = 0x02; // best_score = 513
        assert!(matches!(decode(&bytes), Err(Error::Payload(_))));
    }

    #[test]
    fn encode_names_offending_field() {
        for (vec, name) in [
            (v(2048, 0, 0, 0, 0, 0), "x_prev"),
            (v(0, 4000, 0, 0, 0, 0), "y_prev"),
            (v(0, 0, 40_000, 0, 0, 0), "dx"),
            (v(0, 0, 0, 0, 257, 300), "best_score"),
            (v(0, 0, 0, 0, 1, 300), "second_score"),
        ] {
            match encode(&[vec]) {
                Err(Error::Encode { field, .. }) => assert_eq!(field, name),
                other => panic!("expected encode error, got {other:?}"),
            }
        }
    }

    #[test]
    fn stream_round_trip() {
        let frames = vec![
            vec![],
            vec![v(3, 4, 1, -1, 0, 256)],
            (0..17).map(|i| v(i, i, 0, 0, 1, 2)).collect(),
        ];
        let mut buf = Vec::new();
        write_stream(&mut buf, 640, 480, &frames).unwrap();
        assert_eq!(&buf[..4], b"OFV1");
        assert_eq!(buf.len(), 16 + 3 * 4 + 3 * LINE_BYTES);
        let (header, back) = read_stream(&buf[..]).unwrap();
        assert_eq!(
            header,
            StreamHeader {
                width: 640,
                height: 480,
                frame_count: 3
            }
        );
        assert_eq!(back, frames);
        assert!(read_stream(&buf[..buf.len() - 1]).is_err());
    }
}
