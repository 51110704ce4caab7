//! Filter export/import as `k,re,im` CSV.
//!
//! Leading `# key: value` lines carry metadata; `normalization` and
//! `raw_power` are read back, everything else is ignored. Values are written
//! with 17 significant digits, which round-trips every `f64` exactly.

use num_complex::Complex64;
use std::io::{BufRead, Write};

use super::{band_limits, FdssFilter, Normalization};
use crate::error::{Error, Result};

impl FdssFilter {
    /// Writes the filter; `metadata` pairs are emitted as comment lines
    /// ahead of the filter's own.
    pub fn write_csv<W: Write>(&self, mut w: W, metadata: &[(String, String)]) -> Result<()> {
        for (k, v) in metadata {
            writeln!(w, "# {k}: {v}")?;
        }
        writeln!(w, "# subcarriers: {}", self.m())?;
        writeln!(w, "# normalization: {}", self.normalization())?;
        if let Some(p) = self.raw_power() {
            writeln!(w, "# raw_power: {p:.16e}")?;
        }
        writeln!(w, "k,re,im")?;
        for (k, c) in self.iter() {
            writeln!(w, "{k},{:.16e},{:.16e}", c.re, c.im)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut normalization = Normalization::UnitAveragePower;
        let mut raw_power = None;
        let mut rows: Vec<(i64, Complex64)> = Vec::new();
        let mut header_seen = false;
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let parse_err = |message: String| Error::Parse { line: lineno, message };
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(meta) = trimmed.strip_prefix('#') {
                if let Some((key, value)) = meta.split_once(':') {
                    let value = value.trim();
                    match key.trim() {
                        "normalization" => {
                            normalization = Normalization::parse(value)
                                .ok_or_else(|| parse_err(format!("unknown normalization {value:?}")))?;
                        }
                        "raw_power" => {
                            raw_power = Some(
                                value
                                    .parse::<f64>()
                                    .map_err(|e| parse_err(format!("raw_power: {e}")))?,
                            );
                        }
                        _ => {}
                    }
                }
                continue;
            }
            if !header_seen {
                if trimmed.replace(' ', "") != "k,re,im" {
                    return Err(parse_err(format!("expected header k,re,im, found {trimmed:?}")));
                }
                header_seen = true;
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(parse_err(format!("expected 3 fields, found {}", fields.len())));
            }
            let k = fields[0]
                .parse::<i64>()
                .map_err(|e| parse_err(format!("k: {e}")))?;
            let re = fields[1]
                .parse::<f64>()
                .map_err(|e| parse_err(format!("re: {e}")))?;
            let im = fields[2]
                .parse::<f64>()
                .map_err(|e| parse_err(format!("im: {e}")))?;
            rows.push((k, Complex64::new(re, im)));
        }
        if rows.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "no coefficient rows".into(),
            });
        }
        let (l_d, _) = band_limits(rows.len());
        for (i, (k, _)) in rows.iter().enumerate() {
            if *k != l_d + i as i64 {
                return Err(Error::Parse {
                    line: 0,
                    message: format!(
                        "row {i} has k = {k}, expected {} for an M = {} band",
                        l_d + i as i64,
                        rows.len()
                    ),
                });
            }
        }
        FdssFilter::new(rows.into_iter().map(|(_, c)| c).collect(), normalization, raw_power)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdss::{design_linear, design_plain};
    use proptest::prelude::*;

    #[test]
    fn linear_filter_round_trips_bit_exact() {
        let f = design_linear(318.0, 336).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf, &[("waveform".into(), "linear".into())]).unwrap();
        let g = FdssFilter::read_csv(buf.as_slice()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn plain_export_layout() {
        let mut buf = Vec::new();
        design_plain(2).unwrap().write_csv(&mut buf, &[]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body, ["k,re,im", "0,1.0000000000000000e0,0.0000000000000000e0", "1,1.0000000000000000e0,0.0000000000000000e0"]);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(FdssFilter::read_csv("k,re,im\n".as_bytes()).is_err());
        assert!(FdssFilter::read_csv("k,x,y\n0,1,0\n".as_bytes()).is_err());
        assert!(FdssFilter::read_csv("k,re,im\n5,1,0\n".as_bytes()).is_err());
        assert!(FdssFilter::read_csv("k,re,im\n0,1\n".as_bytes()).is_err());
        assert!(FdssFilter::read_csv("k,re,im\n0,abc,0\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn arbitrary_coefficients_round_trip(
            vals in prop::collection::vec((-1e150f64..1e150, -1e-300f64..1e-300), 1..40)
        ) {
            let coeffs: Vec<_> = vals.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            let f = FdssFilter::from_fourier(coeffs).unwrap();
            let mut buf = Vec::new();
            f.write_csv(&mut buf, &[]).unwrap();
            let g = FdssFilter::read_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(f, g);
        }
    }
}
