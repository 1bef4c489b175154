//! File formats.
//!
//! * Time tags, binary: magic `PHTAG\0\0\x01`, then 9-byte records of one
//!   channel byte (0 = A, 1 = B) and a little-endian u64 picosecond time,
//!   sorted by time.
//! * Time tags, CSV: header `channel,t_ps`, channel written as `A`/`B`
//!   (`0`/`1` also accepted on input).
//! * Histogram CSV `tau_ps,counts`; g² CSV `tau_ps,g2,sigma`.
//! * Spectrum CSV `wavelength_nm,intensity`.
//!
//! The binary tag format has no duration field; readers take the run to end
//! one picosecond after the last tag unless a duration is supplied.

use std::io::{Read, Write};

use crate::correlator::{CoincidenceHistogram, G2Curve};
use crate::error::{Error, Result};
use crate::sim::{Channel, TimeTag, TimeTagStream};
use crate::spectrum::Spectrum;

pub const TAG_MAGIC: [u8; 8] = *b"PHTAG\0\0\x01";
pub const TAG_RECORD_LEN: usize = 9;

fn malformed<T>(offset: u64, message: impl Into<String>) -> Result<T> {
    Err(Error::Malformed {
        offset,
        message: message.into(),
    })
}

pub fn write_tags_binary<W: Write>(mut w: W, stream: &TimeTagStream) -> Result<()> {
    w.write_all(&TAG_MAGIC)?;
    let mut buf = Vec::with_capacity(TAG_RECORD_LEN * 4096);
    for chunk in stream.tags().chunks(4096) {
        buf.clear();
        for tag in chunk {
            buf.push(tag.channel.index() as u8);
            buf.extend_from_slice(&tag.t.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_tags_csv<W: Write>(w: W, stream: &TimeTagStream) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["channel", "t_ps"])?;
    for tag in stream.tags() {
        let ch = match tag.channel {
            Channel::A => "A",
            Channel::B => "B",
        };
        wtr.write_record([ch, &tag.t.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

fn finish_stream(tags: Vec<TimeTag>, duration_ps: Option<u64>) -> Result<TimeTagStream> {
    let inferred = tags.last().map_or(1, |t| t.t + 1);
    let duration = duration_ps.unwrap_or(inferred);
    if duration < inferred {
        return Err(Error::Domain(format!(
            "duration {duration} ps ends before the last tag at {} ps",
            inferred - 1
        )));
    }
    TimeTagStream::new(tags, duration)
}

/// Parses the binary tag format from a complete byte buffer.
pub fn read_tags_binary(bytes: &[u8], duration_ps: Option<u64>) -> Result<TimeTagStream> {
    if bytes.len() < TAG_MAGIC.len() || bytes[..TAG_MAGIC.len()] != TAG_MAGIC {
        return malformed(0, "missing PHTAG magic");
    }
    let body = &bytes[TAG_MAGIC.len()..];
    let mut tags = Vec::with_capacity(body.len() / TAG_RECORD_LEN);
    let mut last = 0u64;
    for (k, rec) in body.chunks(TAG_RECORD_LEN).enumerate() {
        let offset = (TAG_MAGIC.len() + k * TAG_RECORD_LEN) as u64;
        if rec.len() < TAG_RECORD_LEN {
            return malformed(
                offset,
                format!("truncated record: {} of {TAG_RECORD_LEN} bytes", rec.len()),
            );
        }
        let Some(channel) = Channel::from_index(rec[0]) else {
            return malformed(offset, format!("invalid channel byte {}", rec[0]));
        };
        let t = u64::from_le_bytes(rec[1..].try_into().expect("8-byte slice"));
        if t < last {
            return malformed(offset, format!("timestamp {t} ps precedes {last} ps"));
        }
        last = t;
        tags.push(TimeTag { t, channel });
    }
    finish_stream(tags, duration_ps)
}

/// Parses the CSV tag format.
pub fn read_tags_csv<R: Read>(r: R, duration_ps: Option<u64>) -> Result<TimeTagStream> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["channel", "t_ps"] {
        return malformed(0, "expected header `channel,t_ps`");
    }
    let mut tags = Vec::new();
    let mut last = 0u64;
    for rec in rdr.records() {
        let rec = rec?;
        let offset = rec.position().map_or(0, |p| p.byte());
        let channel = match rec.get(0).map(str::trim) {
            Some("A") | Some("a") | Some("0") => Channel::A,
            Some("B") | Some("b") | Some("1") => Channel::B,
            other => return malformed(offset, format!("invalid channel {other:?}")),
        };
        let Some(t) = rec.get(1).and_then(|s| s.trim().parse::<u64>().ok()) else {
            return malformed(offset, "invalid t_ps");
        };
        if t < last {
            return malformed(offset, format!("timestamp {t} ps precedes {last} ps"));
        }
        last = t;
        tags.push(TimeTag { t, channel });
    }
    finish_stream(tags, duration_ps)
}

/// Reads either tag format, chosen by the presence of the binary magic.
pub fn read_tags(bytes: &[u8], duration_ps: Option<u64>) -> Result<TimeTagStream> {
    if bytes.starts_with(&TAG_MAGIC[..5]) {
        read_tags_binary(bytes, duration_ps)
    } else {
        read_tags_csv(bytes, duration_ps)
    }
}

pub fn write_histogram_csv<W: Write>(w: W, h: &CoincidenceHistogram) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["tau_ps", "counts"])?;
    for (i, c) in h.counts.iter().enumerate() {
        wtr.write_record([h.bin_center_ps(i).to_string(), c.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Returns (τ centres in ps, counts).
pub fn read_histogram_csv<R: Read>(r: R) -> Result<(Vec<f64>, Vec<u64>)> {
    let mut tau = Vec::new();
    let mut counts = Vec::new();
    let mut rdr = csv::Reader::from_reader(r);
    check_header(&mut rdr, &["tau_ps", "counts"])?;
    for rec in rdr.records() {
        let rec = rec?;
        let offset = rec.position().map_or(0, |p| p.byte());
        let t = field::<f64>(&rec, 0, offset)?;
        let c = field::<u64>(&rec, 1, offset)?;
        tau.push(t);
        counts.push(c);
    }
    Ok((tau, counts))
}

pub fn write_g2_csv<W: Write>(w: W, g: &G2Curve) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["tau_ps", "g2", "sigma"])?;
    for i in 0..g.len() {
        wtr.write_record([
            g.tau_ps[i].to_string(),
            g.g2[i].to_string(),
            g.sigma[i].to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_g2_csv<R: Read>(r: R) -> Result<G2Curve> {
    let mut rdr = csv::Reader::from_reader(r);
    check_header(&mut rdr, &["tau_ps", "g2", "sigma"])?;
    let mut g = G2Curve {
        tau_ps: Vec::new(),
        g2: Vec::new(),
        sigma: Vec::new(),
    };
    for rec in rdr.records() {
        let rec = rec?;
        let offset = rec.position().map_or(0, |p| p.byte());
        g.tau_ps.push(field(&rec, 0, offset)?);
        g.g2.push(field(&rec, 1, offset)?);
        g.sigma.push(field(&rec, 2, offset)?);
    }
    Ok(g)
}

pub fn write_spectrum_csv<W: Write>(w: W, s: &Spectrum) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["wavelength_nm", "intensity"])?;
    for (x, y) in s.wavelengths().iter().zip(s.intensities()) {
        wtr.write_record([x.to_string(), y.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_spectrum_csv<R: Read>(r: R) -> Result<Spectrum> {
    let mut rdr = csv::Reader::from_reader(r);
    check_header(&mut rdr, &["wavelength_nm", "intensity"])?;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let offset = rec.position().map_or(0, |p| p.byte());
        x.push(field(&rec, 0, offset)?);
        y.push(field(&rec, 1, offset)?);
    }
    Spectrum::new(x, y)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, want: &[&str]) -> Result<()> {
    let got: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|s| s.trim().to_string())
        .collect();
    if got != want {
        return malformed(0, format!("expected header `{}`", want.join(",")));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, offset: u64) -> Result<T> {
    match rec.get(i).map(str::trim).map(str::parse::<T>) {
        Some(Ok(v)) => Ok(v),
        _ => malformed(
            offset,
            format!("column {} is missing or not a number", i + 1),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlator::normalize_g2;

    fn sample_stream() -> TimeTagStream {
        let tags = vec![
            TimeTag {
                t: 0,
                channel: Channel::A,
            },
            TimeTag {
                t: 5,
                channel: Channel::B,
            },
            TimeTag {
                t: 5,
                channel: Channel::A,
            },
            TimeTag {
                t: 1 << 40,
                channel: Channel::B,
            },
        ];
        TimeTagStream::new(tags, (1 << 40) + 1).unwrap()
    }

    #[test]
    fn binary_layout_is_exact() {
        let mut buf = Vec::new();
        write_tags_binary(&mut buf, &sample_stream()).unwrap();
        assert_eq!(&buf[..8], b"PHTAG\0\0\x01");
        assert_eq!(buf.len(), 8 + 4 * 9);
        assert_eq!(buf[8 + 9], 1);
        assert_eq!(&buf[8 + 10..8 + 18], &5u64.to_le_bytes());
        assert_eq!(read_tags_binary(&buf, None).unwrap(), sample_stream());
    }

    #[test]
    fn binary_errors_name_offsets() {
        let mut buf = Vec::new();
        write_tags_binary(&mut buf, &sample_stream()).unwrap();
        buf.truncate(buf.len() - 3);
        match read_tags_binary(&buf, None) {
            Err(Error::Malformed { offset, .. }) => assert_eq!(offset, 8 + 3 * 9),
            other => panic!("unexpected {other:?}"),
        }
        let mut bad = Vec::new();
        write_tags_binary(&mut bad, &sample_stream()).unwrap();
        bad[8 + 9] = 7;
        assert!(matches!(
            read_tags_binary(&bad, None),
            Err(Error::Malformed { offset: 17, .. })
        ));
        assert!(matches!(
            read_tags_binary(b"NOTATAG!", None),
            Err(Error::Malformed { offset: 0, .. })
        ));
    }

    #[test]
    fn csv_and_binary_interconvert() {
        let s = sample_stream();
        let mut csv_buf = Vec::new();
        write_tags_csv(&mut csv_buf, &s).unwrap();
        assert!(csv_buf.starts_with(b"channel,t_ps\nA,0\nB,5\n"));
        let back = read_tags(&csv_buf, None).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_tags_binary(&mut a, &s).unwrap();
        write_tags_binary(&mut b, &back).unwrap();
        assert_eq!(a, b);
        assert!(read_tags(b"channel,t_ps\nC,1\n", None).is_err());
        assert!(read_tags(b"channel,t_ps\nA,5\nA,1\n", None).is_err());
    }

    #[test]
    fn explicit_duration() {
        let mut buf = Vec::new();
        write_tags_binary(&mut buf, &sample_stream()).unwrap();
        let s = read_tags(&buf, Some(1 << 41)).unwrap();
        assert_eq!(s.duration_ps(), 1 << 41);
        assert!(read_tags(&buf, Some(10)).is_err());
    }

    #[test]
    fn g2_csv_round_trip() {
        let h = CoincidenceHistogram {
            bin_width_ps: 1000,
            window_ps: 2000,
            counts: vec![3, 0, 7, 1],
            n_a: 10,
            n_b: 20,
            duration_ps: 1_000_000,
        };
        let g = normalize_g2(&h).unwrap();
        let mut buf = Vec::new();
        write_g2_csv(&mut buf, &g).unwrap();
        assert!(buf.starts_with(b"tau_ps,g2,sigma\n"));
        assert_eq!(read_g2_csv(&buf[..]).unwrap(), g);
        let mut hb = Vec::new();
        write_histogram_csv(&mut hb, &h).unwrap();
        assert!(hb.starts_with(b"tau_ps,counts\n-1500,3\n"));
        let (tau, counts) = read_histogram_csv(&hb[..]).unwrap();
        assert_eq!(counts, h.counts);
        assert_eq!(tau[3], 1500.0);
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn binary_round_trip(mut raw in proptest::collection::vec((0u64..u64::MAX / 2, any::<bool>()), 0..200)) {
            raw.sort_by_key(|r| r.0);
            let tags: Vec<TimeTag> = raw.iter()
                .map(|&(t, b)| TimeTag { t, channel: if b { Channel::B } else { Channel::A } })
                .collect();
            let dur = tags.last().map_or(1, |t| t.t + 1);
            let s = TimeTagStream::new(tags, dur).unwrap();
            let mut buf = Vec::new();
            write_tags_binary(&mut buf, &s).unwrap();
            prop_assert_eq!(read_tags(&buf, Some(dur)).unwrap(), s.clone());
            let mut c = Vec::new();
            write_tags_csv(&mut c, &s).unwrap();
            prop_assert_eq!(read_tags(&c, Some(dur)).unwrap(), s);
        }
    }
}
