//! File formats: provenance-stamped CSV and PGM emitters and the matching
//! readers. Every file begins with comment lines recording strategy, start
//! triple, `n`, `m`, seed, generator name and bins, so any output can be
//! traced back to its run configuration; absent fields are written as `-`.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::dynamics::{CdfBounds, CellId, HistogramGrid, Orientation};
use crate::simplex::AngleTriple;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

/// Run configuration recorded at the top of every emitted file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Provenance {
    pub strategy: Option<String>,
    pub start: Option<AngleTriple>,
    pub n: Option<u32>,
    pub m: Option<u64>,
    pub seed: Option<u64>,
    pub generator: Option<String>,
    pub bins: Option<usize>,
}

impl Provenance {
    pub fn comment_lines(&self) -> Vec<String> {
        let or_dash = |v: Option<String>| v.unwrap_or_else(|| "-".to_owned());
        vec![
            format!("# strategy: {}", or_dash(self.strategy.clone())),
            format!("# start: {}", or_dash(self.start.map(|t| t.to_string()))),
            format!("# n: {}", or_dash(self.n.map(|v| v.to_string()))),
            format!("# m: {}", or_dash(self.m.map(|v| v.to_string()))),
            format!("# seed: {}", or_dash(self.seed.map(|v| v.to_string()))),
            format!("# generator: {}", or_dash(self.generator.clone())),
            format!("# bins: {}", or_dash(self.bins.map(|v| v.to_string()))),
        ]
    }

    fn absorb(&mut self, line: usize, text: &str) -> Result<(), FormatError> {
        let body = text.trim_start_matches('#').trim();
        let Some((key, value)) = body.split_once(':') else {
            return Ok(()); // free-form comment
        };
        let key = key.trim();
        let value = value.trim();
        if value == "-" {
            return Ok(());
        }
        let bad = |what: &str| parse_err(line, format!("bad {what} in comment: {value:?}"));
        match key {
            "strategy" => self.strategy = Some(value.to_owned()),
            "start" => self.start = Some(value.parse().map_err(|_| bad("start triple"))?),
            "n" => self.n = Some(value.parse().map_err(|_| bad("n"))?),
            "m" => self.m = Some(value.parse().map_err(|_| bad("m"))?),
            "seed" => self.seed = Some(value.parse().map_err(|_| bad("seed"))?),
            "generator" => self.generator = Some(value.to_owned()),
            "bins" => self.bins = Some(value.parse().map_err(|_| bad("bins"))?),
            _ => {}
        }
        Ok(())
    }
}

/// Splits a file into leading comments (absorbed into a [`Provenance`]) and
/// the remaining data lines with their 1-based line numbers.
fn split_comments(reader: impl BufRead) -> Result<(Provenance, Vec<(usize, String)>), FormatError> {
    let mut prov = Provenance::default();
    let mut data = Vec::new();
    let mut in_header = true;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if in_header && line.starts_with('#') {
            prov.absorb(lineno, &line)?;
            continue;
        }
        in_header = false;
        if line.trim().is_empty() {
            continue;
        }
        if line.starts_with('#') {
            return Err(parse_err(lineno, "comment after data"));
        }
        data.push((lineno, line));
    }
    Ok((prov, data))
}

// ── triples ─────────────────────────────────────────────────────────────

pub fn write_triples_csv(
    w: &mut impl Write,
    triples: &[AngleTriple],
    prov: &Provenance,
) -> io::Result<()> {
    for line in prov.comment_lines() {
        writeln!(w, "{line}")?;
    }
    writeln!(w, "alpha,beta,gamma")?;
    for t in triples {
        writeln!(w, "{t}")?;
    }
    Ok(())
}

pub fn read_triples_csv(
    reader: impl BufRead,
) -> Result<(Vec<AngleTriple>, Provenance), FormatError> {
    let (prov, data) = split_comments(reader)?;
    let mut rows = data.into_iter();
    match rows.next() {
        Some((_, h)) if h.trim() == "alpha,beta,gamma" => {}
        Some((line, h)) => return Err(parse_err(line, format!("unexpected header {h:?}"))),
        None => return Err(parse_err(0, "empty triples file")),
    }
    let mut out = Vec::new();
    for (line, row) in rows {
        let t: AngleTriple = row
            .parse()
            .map_err(|e| parse_err(line, format!("{e}")))?;
        out.push(t);
    }
    Ok((out, prov))
}

// ── histogram ───────────────────────────────────────────────────────────

pub fn write_histogram_csv(
    w: &mut impl Write,
    grid: &HistogramGrid,
    prov: &Provenance,
) -> io::Result<()> {
    for line in prov.comment_lines() {
        writeln!(w, "{line}")?;
    }
    writeln!(w, "row,col,orientation,count")?;
    for (id, count) in grid.cells() {
        writeln!(w, "{},{},{},{}", id.row, id.col, id.orientation.as_u8(), count)?;
    }
    Ok(())
}

pub fn read_histogram_csv(
    reader: impl BufRead,
) -> Result<(HistogramGrid, Provenance), FormatError> {
    let (prov, data) = split_comments(reader)?;
    let bins = prov
        .bins
        .ok_or_else(|| parse_err(0, "histogram file lacks a '# bins:' comment"))?;
    let probe = HistogramGrid::new(bins);
    let mut rows = data.into_iter();
    match rows.next() {
        Some((_, h)) if h.trim() == "row,col,orientation,count" => {}
        Some((line, h)) => return Err(parse_err(line, format!("unexpected header {h:?}"))),
        None => return Err(parse_err(0, "empty histogram file")),
    }
    let mut counts: Vec<Option<u64>> = vec![None; bins * bins];
    for (line, row) in rows {
        let parts: Vec<&str> = row.split(',').collect();
        if parts.len() != 4 {
            return Err(parse_err(line, format!("expected 4 fields, got {}", parts.len())));
        }
        let field = |i: usize| -> Result<u64, FormatError> {
            parts[i]
                .trim()
                .parse::<u64>()
                .map_err(|_| parse_err(line, format!("bad integer {:?}", parts[i])))
        };
        let orientation = Orientation::from_u8(field(2)? as u8)
            .ok_or_else(|| parse_err(line, "orientation must be 0 or 1"))?;
        let id = CellId { row: field(0)? as usize, col: field(1)? as usize, orientation };
        let idx = probe
            .cell_index(id)
            .ok_or_else(|| parse_err(line, format!("cell out of range: {id:?}")))?;
        if counts[idx].replace(field(3)?).is_some() {
            return Err(parse_err(line, format!("duplicate cell: {id:?}")));
        }
    }
    let counts: Vec<u64> = counts
        .into_iter()
        .collect::<Option<Vec<u64>>>()
        .ok_or_else(|| parse_err(0, "histogram file is missing cells"))?;
    let grid = HistogramGrid::from_counts(bins, counts)
        .ok_or_else(|| parse_err(0, "inconsistent histogram dimensions"))?;
    Ok((grid, prov))
}

// ── CDF bounds ──────────────────────────────────────────────────────────

pub fn write_cdf_csv(w: &mut impl Write, cdf: &CdfBounds, prov: &Provenance) -> io::Result<()> {
    for line in prov.comment_lines() {
        writeln!(w, "{line}")?;
    }
    writeln!(w, "theta,lower,upper")?;
    for g in 0..cdf.thetas.len() {
        writeln!(w, "{},{},{}", cdf.thetas[g], cdf.lower[g], cdf.upper[g])?;
    }
    Ok(())
}

pub fn read_cdf_csv(reader: impl BufRead) -> Result<(CdfBounds, Provenance), FormatError> {
    let (prov, data) = split_comments(reader)?;
    let generation = prov
        .n
        .ok_or_else(|| parse_err(0, "cdf file lacks a '# n:' comment"))?;
    let mut rows = data.into_iter();
    match rows.next() {
        Some((_, h)) if h.trim() == "theta,lower,upper" => {}
        Some((line, h)) => return Err(parse_err(line, format!("unexpected header {h:?}"))),
        None => return Err(parse_err(0, "empty cdf file")),
    }
    let mut thetas = Vec::new();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for (line, row) in rows {
        let parts: Vec<&str> = row.split(',').collect();
        if parts.len() != 3 {
            return Err(parse_err(line, format!("expected 3 fields, got {}", parts.len())));
        }
        let field = |i: usize| -> Result<f64, FormatError> {
            parts[i]
                .trim()
                .parse::<f64>()
                .map_err(|_| parse_err(line, format!("bad float {:?}", parts[i])))
        };
        thetas.push(field(0)?);
        lower.push(field(1)?);
        upper.push(field(2)?);
    }
    Ok((CdfBounds { generation, thetas, lower, upper }, prov))
}

// ── PGM raster ──────────────────────────────────────────────────────────

/// Renders the histogram as a plain (P2) PGM raster of the embedded
/// simplex, `width` pixels wide, max-count normalized: empty cells are
/// white, the modal cell is black, pixels outside the simplex are white.
pub fn write_histogram_pgm(
    w: &mut impl Write,
    grid: &HistogramGrid,
    prov: &Provenance,
    width: usize,
) -> io::Result<()> {
    use std::f64::consts::PI;
    let width = width.max(1);
    let height = ((width as f64) * 3f64.sqrt() / 2.0).round().max(1.0) as usize;
    let u_max = 2.0 * PI / 3f64.sqrt();
    let max_count = grid.max_count();

    writeln!(w, "P2")?;
    for line in prov.comment_lines() {
        writeln!(w, "{line}")?;
    }
    writeln!(w, "{width} {height}")?;
    writeln!(w, "255")?;
    let mut line_buf = String::new();
    for py in 0..height {
        let v = (1.0 - (py as f64 + 0.5) / height as f64) * PI;
        for px in 0..width {
            let u = (px as f64 + 0.5) / width as f64 * u_max;
            let alpha = v;
            let beta = (3f64.sqrt() * u - alpha) / 2.0;
            let gamma = PI - alpha - beta;
            let gray = match AngleTriple::new(alpha, beta, gamma) {
                Ok(t) if max_count > 0 => {
                    let c = grid.counts()[grid.cell_of(&t)];
                    255 - ((255.0 * c as f64 / max_count as f64).round() as u32).min(255)
                }
                _ => 255,
            };
            if !line_buf.is_empty() {
                line_buf.push(' ');
            }
            line_buf.push_str(&gray.to_string());
            if line_buf.len() > 64 {
                writeln!(w, "{line_buf}")?;
                line_buf.clear();
            }
        }
    }
    if !line_buf.is_empty() {
        writeln!(w, "{line_buf}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{cdf_bounds, histogram, theta_grid};
    use std::f64::consts::PI;

    fn sample_prov() -> Provenance {
        Provenance {
            strategy: Some("incenter".to_owned()),
            start: Some(AngleTriple::equilateral()),
            n: Some(3),
            m: Some(100),
            seed: Some(42),
            generator: Some("chacha12".to_owned()),
            bins: Some(4),
        }
    }

    #[test]
    fn triples_round_trip() {
        let triples = vec![
            AngleTriple::equilateral(),
            AngleTriple::new(PI / 4.0, PI / 4.0, PI / 2.0).unwrap(),
            AngleTriple::new(PI, 0.0, 0.0).unwrap(),
        ];
        let mut buf = Vec::new();
        write_triples_csv(&mut buf, &triples, &sample_prov()).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# strategy: incenter\n"));
        let (back, prov) = read_triples_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 3);
        for (a, b) in back.iter().zip(triples.iter()) {
            assert!(a.distance(b) < 1e-12);
        }
        assert_eq!(prov.seed, Some(42));
        assert_eq!(prov.strategy.as_deref(), Some("incenter"));
    }

    #[test]
    fn histogram_round_trip() {
        let samples = vec![AngleTriple::equilateral(); 7];
        let grid = histogram(&samples, 4);
        let mut buf = Vec::new();
        write_histogram_csv(&mut buf, &grid, &sample_prov()).unwrap();
        let (back, prov) = read_histogram_csv(buf.as_slice()).unwrap();
        assert_eq!(back, grid);
        assert_eq!(prov.bins, Some(4));
    }

    #[test]
    fn histogram_reader_rejects_damage() {
        let samples = vec![AngleTriple::equilateral(); 3];
        let grid = histogram(&samples, 2);
        let mut buf = Vec::new();
        write_histogram_csv(&mut buf, &grid, &sample_prov()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        // drop a data row
        let truncated: Vec<&str> = text.lines().collect();
        let missing = truncated[..truncated.len() - 1].join("\n");
        assert!(read_histogram_csv(missing.as_bytes()).is_err());
        // remove the bins comment
        let no_bins: String = text.lines().filter(|l| !l.starts_with("# bins")).collect::<Vec<_>>().join("\n");
        assert!(read_histogram_csv(no_bins.as_bytes()).is_err());
    }

    #[test]
    fn cdf_round_trip() {
        let cdf = cdf_bounds(2, &theta_grid(16)).unwrap();
        let prov = Provenance { n: Some(2), ..Default::default() };
        let mut buf = Vec::new();
        write_cdf_csv(&mut buf, &cdf, &prov).unwrap();
        let (back, _) = read_cdf_csv(buf.as_slice()).unwrap();
        assert_eq!(back.generation, 2);
        assert_eq!(back.thetas, cdf.thetas);
        assert_eq!(back.lower, cdf.lower);
        assert_eq!(back.upper, cdf.upper);
    }

    #[test]
    fn pgm_has_valid_shape() {
        let samples = vec![AngleTriple::equilateral(); 5];
        let grid = histogram(&samples, 4);
        let mut buf = Vec::new();
        write_histogram_pgm(&mut buf, &grid, &sample_prov(), 64).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("P2"));
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#') && *l != "P2").collect();
        let dims: Vec<usize> = body[0].split_whitespace().map(|x| x.parse().unwrap()).collect();
        assert_eq!(dims[0], 64);
        assert_eq!(dims[1], 55); // round(64·√3/2)
        assert_eq!(body[1], "255");
        let values: Vec<u32> = body[2..]
            .iter()
            .flat_map(|l| l.split_whitespace())
            .map(|x| x.parse().unwrap())
            .collect();
        assert_eq!(values.len(), 64 * 55);
        assert!(values.iter().all(|&v| v <= 255));
        assert!(values.contains(&0), "modal cell renders black");
        assert!(text.lines().all(|l| l.len() <= 70), "plain PGM line limit");
    }

    #[test]
    fn provenance_dashes_stay_absent() {
        let prov = Provenance::default();
        let lines = prov.comment_lines();
        assert_eq!(lines[0], "# strategy: -");
        let mut buf = Vec::new();
        write_triples_csv(&mut buf, &[], &prov).unwrap();
        let (back, prov2) = read_triples_csv(buf.as_slice()).unwrap();
        assert!(back.is_empty());
        assert_eq!(prov2, prov);
    }
}
