//! Plain-text algorithm files.
//!
//! A file is a list of `key value...` lines. `#` starts a comment and blank
//! lines are ignored. The first line names the family:
//!
//! ```text
//! family grid            # n^3 cells, row-major over (a, b, c), c fastest
//! n 2
//! bits 0110 1001         # whitespace inside bits is ignored; may repeat
//!
//! family rank            # one line per order pattern of (a, b, c)
//! 012 0
//! 021 1                  # ... all six patterns, each exactly once
//!
//! family threshold
//! cuts 1/3 1/2           # exact cuts; `cuts ~ 0.33 0.5` for float cuts
//! table 0101...          # (cuts+1)^3 cells, last coordinate fastest
//!
//! family region
//! shape cone 0.38        # apex; then `normal w0 w1 w2` and `clause i j` lines
//! shape halfspace 1 0 0 0.5
//! shape majority 0.5
//! shape full | empty
//! shape grid             # followed by `n` and `bits` as for grids
//! directions -+-         # optional monotonicity claim
//!
//! family builtin
//! name f3
//!
//! family constant
//! value 1
//! ```
//!
//! Float threshold cuts produce a region algorithm without a monotonicity
//! claim, which only Monte Carlo evaluation accepts.

use std::fmt::Write as _;
use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{
    builtin, Algorithm, Builtin, ConeRegion, Direction, GridAlgorithm, MonotoneRegionAlgorithm, OrderPattern,
    RankAlgorithm, RegionShape, ThresholdAlgorithm,
};
use crate::scalar::{fmt_ratio, parse_rational};
use crate::Rational;

/// A non-comment line with its 1-based number.
struct Line<'a> {
    no: usize,
    key: &'a str,
    rest: Vec<&'a str>,
}

fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let mut toks = body.split_whitespace();
            let key = toks.next()?;
            Some(Line { no: i + 1, key, rest: toks.collect() })
        })
        .collect()
}

fn parse_bits(line: &Line<'_>, out: &mut Vec<bool>) -> Result<()> {
    for tok in &line.rest {
        for ch in tok.chars() {
            match ch {
                '0' => out.push(false),
                '1' => out.push(true),
                other => return Err(Error::parse(line.no, format!("bit {other:?} is not 0 or 1"))),
            }
        }
    }
    Ok(())
}

fn one_arg<'a>(line: &Line<'a>) -> Result<&'a str> {
    match line.rest.as_slice() {
        [v] => Ok(v),
        _ => Err(Error::parse(line.no, format!("`{}` takes exactly one value", line.key))),
    }
}

fn float(line: &Line<'_>, tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::parse(line.no, format!("not a finite number: {tok:?}")))
}

/// `n` and `bits` lines; returns the grid and the lines it did not consume.
fn parse_grid<'a, 'b>(body: &'b [Line<'a>], header: usize) -> Result<(GridAlgorithm, Vec<&'b Line<'a>>)> {
    let mut n = None;
    let mut bits = Vec::new();
    let mut rest = Vec::new();
    for line in body {
        match line.key {
            "n" => {
                let v = one_arg(line)?;
                n = Some(v.parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| Error::parse(line.no, format!("bad resolution {v:?}")))?);
            }
            "bits" => parse_bits(line, &mut bits)?,
            _ => rest.push(line),
        }
    }
    let n = n.ok_or_else(|| Error::parse(header, "grid needs an `n` line"))?;
    let cells = n.checked_pow(3).ok_or_else(|| Error::parse(header, "resolution too large"))?;
    if bits.len() != cells {
        return Err(Error::parse(header, format!("grid of resolution {n} needs {cells} bits, got {}", bits.len())));
    }
    Ok((GridAlgorithm::new(n, bits)?, rest))
}

fn unexpected(line: &Line<'_>, family: &str) -> Error {
    Error::parse(line.no, format!("unexpected key {:?} in a {family} file", line.key))
}

fn parse_rank(body: &[Line<'_>], header: usize) -> Result<RankAlgorithm> {
    let mut decision: [Option<bool>; 6] = [None; 6];
    for line in body {
        let pattern = OrderPattern::parse(line.key).ok_or_else(|| unexpected(line, "rank"))?;
        let bit = match one_arg(line)? {
            "0" => false,
            "1" => true,
            other => return Err(Error::parse(line.no, format!("decision {other:?} is not 0 or 1"))),
        };
        let slot = &mut decision[pattern.index()];
        if slot.is_some() {
            return Err(Error::parse(line.no, format!("pattern {pattern} given twice")));
        }
        *slot = Some(bit);
    }
    let mut out = [false; 6];
    for (i, d) in decision.iter().enumerate() {
        out[i] = d.ok_or_else(|| Error::parse(header, format!("pattern {} has no decision", OrderPattern::ALL[i])))?;
    }
    Ok(RankAlgorithm { decision: out })
}

fn parse_threshold(body: &[Line<'_>], header: usize) -> Result<Algorithm> {
    let mut cuts: Option<(bool, Vec<String>, usize)> = None;
    let mut table = Vec::new();
    for line in body {
        match line.key {
            "cuts" => {
                let float = line.rest.first() == Some(&"~");
                let vals = line.rest.iter().skip(usize::from(float)).map(|s| s.to_string()).collect();
                cuts = Some((float, vals, line.no));
            }
            "table" => parse_bits(line, &mut table)?,
            _ => return Err(unexpected(line, "threshold")),
        }
    }
    let (float_cuts, vals, no) = cuts.ok_or_else(|| Error::parse(header, "threshold needs a `cuts` line"))?;
    let at = |e: Error| match e {
        Error::InvalidInput(msg) => Error::parse(no, msg),
        other => other,
    };
    if float_cuts {
        let line = Line { no, key: "cuts", rest: Vec::new() };
        let cuts = vals.iter().map(|v| float(&line, v)).collect::<Result<Vec<f64>>>()?;
        let t = ThresholdAlgorithm::new(cuts, table).map_err(at)?;
        return Ok(Algorithm::Region(MonotoneRegionAlgorithm::new(RegionShape::Threshold(t), None)));
    }
    let cuts = vals
        .iter()
        .map(|v| parse_rational(v).ok_or_else(|| Error::parse(no, format!("not an exact rational: {v:?} (use `cuts ~ ...` for floats)"))))
        .collect::<Result<Vec<Rational>>>()?;
    Ok(Algorithm::Threshold(ThresholdAlgorithm::new(cuts, table).map_err(at)?))
}

fn parse_region(body: &[Line<'_>], header: usize) -> Result<MonotoneRegionAlgorithm> {
    let shape_line = body
        .iter()
        .find(|l| l.key == "shape")
        .ok_or_else(|| Error::parse(header, "region needs a `shape` line"))?;
    let kind = *shape_line.rest.first().ok_or_else(|| Error::parse(shape_line.no, "shape needs a kind"))?;
    let args = &shape_line.rest[1..];
    let want = |k: usize| {
        if args.len() == k {
            Ok(())
        } else {
            Err(Error::parse(shape_line.no, format!("shape {kind} takes {k} values, got {}", args.len())))
        }
    };
    let mut directions = None;
    let mut normals = Vec::new();
    let mut clauses = Vec::new();
    let mut leftovers = Vec::new();
    let mut shape = match kind {
        "full" => want(0).map(|_| RegionShape::Full)?,
        "empty" => want(0).map(|_| RegionShape::Empty)?,
        "halfspace" => {
            want(4)?;
            let v = args.iter().map(|a| float(shape_line, a)).collect::<Result<Vec<f64>>>()?;
            RegionShape::HalfSpace { weights: [v[0], v[1], v[2]], offset: v[3] }
        }
        "majority" => {
            want(1)?;
            RegionShape::Cone(ConeRegion::majority(float(shape_line, args[0])?))
        }
        "cone" => {
            want(1)?;
            RegionShape::Cone(ConeRegion { apex: float(shape_line, args[0])?, normals: Vec::new(), clauses: Vec::new() })
        }
        "grid" => {
            want(0)?;
            let rest: Vec<Line<'_>> =
                body.iter().filter(|l| l.key == "n" || l.key == "bits").map(|l| Line { no: l.no, key: l.key, rest: l.rest.clone() }).collect();
            RegionShape::Grid(parse_grid(&rest, shape_line.no)?.0)
        }
        other => return Err(Error::parse(shape_line.no, format!("unknown shape {other:?}"))),
    };
    for line in body {
        match line.key {
            "shape" if std::ptr::eq(line, shape_line) => {}
            "shape" => return Err(Error::parse(line.no, "region has more than one shape")),
            "directions" => {
                let v = one_arg(line)?;
                directions = Some(Direction::parse_all(v).ok_or_else(|| Error::parse(line.no, format!("bad directions {v:?} (expected three of + and -)")))?);
            }
            "normal" if kind == "cone" => {
                let v = line.rest.iter().map(|a| float(line, a)).collect::<Result<Vec<f64>>>()?;
                let w: [f64; 3] = v.try_into().map_err(|_| Error::parse(line.no, "a normal has three components"))?;
                normals.push(w);
            }
            "clause" if kind == "cone" => {
                let idx = line
                    .rest
                    .iter()
                    .map(|a| a.parse::<usize>().map_err(|_| Error::parse(line.no, format!("bad normal index {a:?}"))))
                    .collect::<Result<Vec<usize>>>()?;
                clauses.push((line.no, idx));
            }
            "n" | "bits" if kind == "grid" => {}
            _ => leftovers.push(line),
        }
    }
    if let Some(line) = leftovers.first() {
        return Err(unexpected(line, "region"));
    }
    if let RegionShape::Cone(cone) = &mut shape {
        if kind == "cone" {
            for (no, clause) in &clauses {
                if clause.is_empty() || clause.iter().any(|&i| i >= normals.len()) {
                    return Err(Error::parse(*no, format!("clause must list indices below {}", normals.len())));
                }
            }
            cone.normals = normals;
            cone.clauses = clauses.into_iter().map(|(_, c)| c).collect();
        }
    }
    Ok(MonotoneRegionAlgorithm::new(shape, directions))
}

/// Parse an algorithm file's text.
pub fn parse_algorithm(text: &str) -> Result<Algorithm> {
    let all = lines(text);
    let (head, body) = all.split_first().ok_or_else(|| Error::parse(1, "empty algorithm file"))?;
    if head.key != "family" {
        return Err(Error::parse(head.no, "the first line must be `family <kind>`"));
    }
    let family = one_arg(head)?;
    match family {
        "grid" => {
            let (grid, rest) = parse_grid(body, head.no)?;
            match rest.first() {
                Some(line) => Err(unexpected(line, "grid")),
                None => Ok(Algorithm::Grid(grid)),
            }
        }
        "rank" => Ok(Algorithm::Rank(parse_rank(body, head.no)?)),
        "threshold" => parse_threshold(body, head.no),
        "region" => Ok(Algorithm::Region(parse_region(body, head.no)?)),
        "builtin" => match body {
            [line] if line.key == "name" => {
                let which: Builtin = one_arg(line)?.parse().map_err(|e: Error| Error::parse(line.no, e.to_string()))?;
                Ok(builtin(which))
            }
            _ => Err(Error::parse(head.no, "builtin needs exactly one `name` line")),
        },
        "constant" => match body {
            [line] if line.key == "value" => match one_arg(line)? {
                "0" => Ok(Algorithm::Grid(GridAlgorithm::constant(1, false))),
                "1" => Ok(Algorithm::Grid(GridAlgorithm::constant(1, true))),
                other => Err(Error::parse(line.no, format!("constant value {other:?} is not 0 or 1"))),
            },
            _ => Err(Error::parse(head.no, "constant needs exactly one `value` line")),
        },
        other => Err(Error::parse(head.no, format!("unknown family {other:?}"))),
    }
}

pub fn read_algorithm(mut input: impl BufRead) -> Result<Algorithm> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    parse_algorithm(&text)
}

/// An existing file, a built-in name (`f1`, `f2`, `f3`), or `constant` /
/// `constant0` for the all-one and all-zero algorithms.
pub fn resolve_algorithm(arg: &str) -> Result<Algorithm> {
    match arg {
        "constant" | "constant1" => return Ok(Algorithm::Grid(GridAlgorithm::constant(1, true))),
        "constant0" => return Ok(Algorithm::Grid(GridAlgorithm::constant(1, false))),
        _ => {}
    }
    if Path::new(arg).is_file() {
        return parse_algorithm(&std::fs::read_to_string(arg)?);
    }
    arg.parse::<Builtin>()
        .map(builtin)
        .map_err(|_| Error::invalid(format!("{arg:?} is neither a readable file nor a built-in algorithm")))
}

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn write_bits(out: &mut String, key: &str, bits: &[bool], per_line: usize) {
    for chunk in bits.chunks(per_line.max(1)) {
        let _ = writeln!(out, "{key} {}", bit_string(chunk));
    }
}

/// Text that [`parse_algorithm`] reads back to an equal algorithm. Float
/// parameters are written with enough digits to round-trip.
pub fn format_algorithm(f: &Algorithm) -> String {
    let mut out = String::new();
    match f {
        Algorithm::Grid(g) => {
            let _ = writeln!(out, "family grid\nn {}", g.n());
            write_bits(&mut out, "bits", g.table(), g.n() * g.n());
        }
        Algorithm::Rank(r) => {
            out.push_str("family rank\n");
            for (p, d) in OrderPattern::ALL.iter().zip(r.decision) {
                let _ = writeln!(out, "{p} {}", u8::from(d));
            }
        }
        Algorithm::Threshold(t) => {
            let cuts: Vec<String> = t.cuts().iter().map(fmt_ratio).collect();
            let _ = writeln!(out, "family threshold\ncuts {}", cuts.join(" "));
            write_bits(&mut out, "table", t.decision(), t.intervals() * t.intervals());
        }
        Algorithm::Region(r) => {
            out.push_str("family region\n");
            match &r.shape {
                RegionShape::Full => out.push_str("shape full\n"),
                RegionShape::Empty => out.push_str("shape empty\n"),
                RegionShape::HalfSpace { weights: w, offset } => {
                    let _ = writeln!(out, "shape halfspace {:?} {:?} {:?} {:?}", w[0], w[1], w[2], offset);
                }
                RegionShape::Cone(c) => {
                    let _ = writeln!(out, "shape cone {:?}", c.apex);
                    for w in &c.normals {
                        let _ = writeln!(out, "normal {:?} {:?} {:?}", w[0], w[1], w[2]);
                    }
                    for clause in &c.clauses {
                        let idx: Vec<String> = clause.iter().map(|i| i.to_string()).collect();
                        let _ = writeln!(out, "clause {}", idx.join(" "));
                    }
                }
                RegionShape::Threshold(t) => {
                    // A float threshold file parses back to this same region.
                    let cuts: Vec<String> = t.cuts().iter().map(|c| format!("{c:?}")).collect();
                    out.clear();
                    let _ = writeln!(out, "family threshold\ncuts ~ {}", cuts.join(" "));
                    write_bits(&mut out, "table", t.decision(), t.intervals() * t.intervals());
                    return out;
                }
                RegionShape::Grid(g) => {
                    let _ = writeln!(out, "shape grid\nn {}", g.n());
                    write_bits(&mut out, "bits", g.table(), g.n() * g.n());
                }
            }
            if let Some(d) = r.directions {
                let _ = writeln!(out, "directions {}", Direction::format_all(d));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluate::p_exact;
    use crate::model::{Oracle, MINUS_PLUS_MINUS};
    use crate::scalar::ratio;

    #[test]
    fn builtins_and_constants() {
        let f3 = parse_algorithm("# the classic\nfamily builtin\nname f3\n").unwrap();
        assert_eq!(p_exact(&f3).unwrap(), ratio(1, 4));
        let one = parse_algorithm("family constant\nvalue 1").unwrap();
        assert_eq!(p_exact(&one).unwrap(), ratio(1, 1));
        assert!(resolve_algorithm("f2").is_ok());
        assert!(resolve_algorithm("f9").is_err());
    }

    #[test]
    fn grid_bits_may_span_lines() {
        let text = "family grid\nn 2\nbits 0110\nbits 1001 # second half\n";
        let Algorithm::Grid(g) = parse_algorithm(text).unwrap() else { panic!() };
        assert_eq!(g.ones(), 4);
        assert!(g.get(0, 0, 1) && g.get(1, 1, 1) && !g.get(1, 1, 0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("family grid\nn 2\nbits 01x0\n", 3),
            ("\n\nfamily grid\nn 2\nbits 0101\n", 3),
            ("family rank\n012 1\n012 0\n", 3),
            ("family threshold\ncuts 1/2\ntable 0101\n", 2),
            ("family threshold\n\ncuts 0.5\ntable 01010101\nextra 1\n", 5),
            ("family region\nshape cone 0.5\nnormal 1 0\n", 3),
            ("family region\nshape cone 0.5\nnormal 1 0 0\nclause 0 1\n", 4),
            ("family region\nshape full\ndirections +x+\n", 3),
            ("family widget\n", 1),
        ];
        for (text, line) in cases {
            match parse_algorithm(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn float_cuts_give_an_opaque_region() {
        let f = parse_algorithm("family threshold\ncuts ~ 0.4\ntable 00110011\n").unwrap();
        assert!(matches!(f, Algorithm::Region(_)));
        assert!(f.eval(0.0, 0.41, 0.0) && !f.eval(0.0, 0.39, 0.0));
        assert!(p_exact(&f).is_err());
    }

    #[test]
    fn formats_round_trip() {
        let cone = MonotoneRegionAlgorithm::new(RegionShape::Cone(ConeRegion::majority(0.38)), Some(MINUS_PLUS_MINUS));
        let algos = [
            builtin(Builtin::F1),
            builtin(Builtin::F2),
            builtin(Builtin::F3),
            Algorithm::Grid(GridAlgorithm::from_fn(3, |a, b, c| (a + 2 * b + c) % 3 == 0)),
            Algorithm::Region(cone),
            Algorithm::Region(MonotoneRegionAlgorithm::new(RegionShape::HalfSpace { weights: [0.1, 1.0, -0.3], offset: 0.5 }, None)),
        ];
        for f in &algos {
            let text = format_algorithm(f);
            let back = parse_algorithm(&text).unwrap();
            assert_eq!(format_algorithm(&back), text);
        }
    }
}
