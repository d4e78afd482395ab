//! Text formats for states, density matrices, and Kraus channels.
//!
//! State files: `modes: a b c` header, then one `<re> <im> |<bits>>` term
//! per line. Density files: `modes:` header, `dim: N`, then N rows of
//! row-major re/im pairs. Channel files: `kraus: <count>` header, then per
//! operator `dim: R C` and R rows. `#` starts a comment, blank lines are
//! skipped, and all numbers round-trip at 17 significant digits.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channels::KrausChannel;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::fock::{BasisState, FockVector, ModeOrder};

// negative zero prints as `-0e0`; emit one canonical zero instead so the
// same state always serializes to the same bytes
fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

struct Token<'a> {
    text: &'a str,
    col: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    fn token(&self, idx: usize) -> Option<&Token<'a>> {
        self.tokens.get(idx)
    }

    fn f64_at(&self, idx: usize) -> Result<f64> {
        let tok = self
            .token(idx)
            .ok_or_else(|| Error::parse(self.number, 1, format!("expected {} numbers", idx + 1)))?;
        tok.text
            .parse::<f64>()
            .map_err(|_| Error::parse(self.number, tok.col, format!("`{}` is not a number", tok.text)))
    }
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut cursor = 0;
        for piece in body.split_whitespace() {
            let at = body[cursor..].find(piece).expect("piece comes from body") + cursor;
            tokens.push(Token { text: piece, col: at + 1 });
            cursor = at + piece.len();
        }
        if !tokens.is_empty() {
            lines.push(Line { number: i + 1, tokens });
        }
    }
    lines
}

fn parse_mode_header(line: &Line, allow_empty: bool) -> Result<ModeOrder> {
    let head = line.token(0).expect("tokenized lines are nonempty");
    if head.text != "modes:" {
        return Err(Error::parse(line.number, head.col, "expected `modes:` header"));
    }
    if line.tokens.len() < 2 {
        // a fully traced-out density has no modes left
        if allow_empty {
            return Ok(ModeOrder::from_vec_unchecked(Vec::new()));
        }
        return Err(Error::parse(line.number, head.col, "`modes:` lists no labels"));
    }
    ModeOrder::new(line.tokens[1..].iter().map(|t| t.text))
        .map_err(|e| Error::parse(line.number, head.col, e.to_string()))
}

fn parse_counted_header(line: &Line, key: &str, expected: usize) -> Result<Vec<usize>> {
    let head = line.token(0).expect("tokenized lines are nonempty");
    if head.text != key {
        return Err(Error::parse(line.number, head.col, format!("expected `{key}` header")));
    }
    if line.tokens.len() != expected + 1 {
        return Err(Error::parse(
            line.number,
            head.col,
            format!("`{key}` takes {expected} integer(s)"),
        ));
    }
    line.tokens[1..]
        .iter()
        .map(|t| {
            t.text
                .parse::<usize>()
                .map_err(|_| Error::parse(line.number, t.col, format!("`{}` is not a count", t.text)))
        })
        .collect()
}

pub fn parse_state(text: &str) -> Result<FockVector> {
    let lines = tokenize(text);
    let header = lines
        .first()
        .ok_or_else(|| Error::parse(1, 1, "file has no content"))?;
    let order = parse_mode_header(header, false)?;
    let n = order.len();

    let mut terms = Vec::new();
    for line in &lines[1..] {
        if line.tokens.len() != 3 {
            return Err(Error::parse(
                line.number,
                line.tokens[0].col,
                "term lines are `<re> <im> |<bits>>`",
            ));
        }
        let re = line.f64_at(0)?;
        let im = line.f64_at(1)?;
        let ket = line.token(2).expect("length checked");
        let bits = ket
            .text
            .strip_prefix('|')
            .and_then(|s| s.strip_suffix('>'))
            .ok_or_else(|| Error::parse(line.number, ket.col, format!("`{}` is not a |...> ket", ket.text)))?;
        if bits.len() != n {
            return Err(Error::parse(
                line.number,
                ket.col,
                format!("ket `{}` has {} digits, expected {n}", ket.text, bits.len()),
            ));
        }
        let state = BasisState::from_bit_str(bits)
            .map_err(|e| Error::parse(line.number, ket.col, e.to_string()))?;
        terms.push((state, Complex64::new(re, im)));
    }
    FockVector::from_terms(order, terms)
}

pub fn write_state(state: &FockVector) -> String {
    let mut out = format!("modes: {}\n", state.order());
    for (bs, amp) in state.terms() {
        writeln!(out, "{:.16e} {:.16e} {}", clean(amp.re), clean(amp.im), bs).expect("string write");
    }
    out
}

fn parse_rows(lines: &[Line], nrows: usize, ncols: usize, after: usize) -> Result<DMatrix<Complex64>> {
    let mut mat = DMatrix::zeros(nrows, ncols);
    for r in 0..nrows {
        let line = lines
            .get(r)
            .ok_or_else(|| Error::parse(after, 1, format!("expected {nrows} matrix rows")))?;
        if line.tokens.len() != 2 * ncols {
            return Err(Error::parse(
                line.number,
                line.tokens[0].col,
                format!("row has {} numbers, expected {}", line.tokens.len(), 2 * ncols),
            ));
        }
        for c in 0..ncols {
            mat[(r, c)] = Complex64::new(line.f64_at(2 * c)?, line.f64_at(2 * c + 1)?);
        }
    }
    Ok(mat)
}

pub fn parse_density(text: &str) -> Result<DensityMatrix> {
    let lines = tokenize(text);
    let header = lines
        .first()
        .ok_or_else(|| Error::parse(1, 1, "file has no content"))?;
    let order = parse_mode_header(header, true)?;
    let dim_line = lines
        .get(1)
        .ok_or_else(|| Error::parse(header.number, 1, "missing `dim:` line"))?;
    let dim = parse_counted_header(dim_line, "dim:", 1)?[0];
    if dim != order.dim() {
        return Err(Error::parse(
            dim_line.number,
            dim_line.tokens[1].col,
            format!("dim {dim} does not match 2^{} modes", order.len()),
        ));
    }
    let mat = parse_rows(&lines[2..], dim, dim, dim_line.number)?;
    if lines.len() > 2 + dim {
        let extra = &lines[2 + dim];
        return Err(Error::parse(extra.number, extra.tokens[0].col, "trailing content after matrix"));
    }
    DensityMatrix::new(order, mat)
}

pub fn write_density(rho: &DensityMatrix) -> String {
    let dim = rho.dim();
    let mut out = if rho.order().is_empty() {
        format!("modes:\ndim: {dim}\n")
    } else {
        format!("modes: {}\ndim: {}\n", rho.order(), dim)
    };
    let m = rho.matrix();
    for r in 0..dim {
        for c in 0..dim {
            if c > 0 {
                out.push(' ');
            }
            write!(out, "{:.16e} {:.16e}", clean(m[(r, c)].re), clean(m[(r, c)].im)).expect("string write");
        }
        out.push('\n');
    }
    out
}

pub fn parse_channel(text: &str) -> Result<KrausChannel> {
    let lines = tokenize(text);
    let header = lines
        .first()
        .ok_or_else(|| Error::parse(1, 1, "file has no content"))?;
    let count = parse_counted_header(header, "kraus:", 1)?[0];
    if count == 0 {
        return Err(Error::parse(header.number, header.tokens[1].col, "channel needs at least one operator"));
    }
    let mut kraus = Vec::with_capacity(count);
    let mut at = 1;
    for _ in 0..count {
        let dim_line = lines
            .get(at)
            .ok_or_else(|| Error::parse(header.number, 1, format!("expected {count} operators")))?;
        let shape = parse_counted_header(dim_line, "dim:", 2)?;
        let (nrows, ncols) = (shape[0], shape[1]);
        kraus.push(parse_rows(&lines[at + 1..], nrows, ncols, dim_line.number)?);
        at += 1 + nrows;
    }
    if lines.len() > at {
        let extra = &lines[at];
        return Err(Error::parse(extra.number, extra.tokens[0].col, "trailing content after operators"));
    }
    KrausChannel::new(kraus)
}

pub fn write_channel(channel: &KrausChannel) -> String {
    let mut out = format!("kraus: {}\n", channel.kraus().len());
    for k in channel.kraus() {
        writeln!(out, "dim: {} {}", k.nrows(), k.ncols()).expect("string write");
        for r in 0..k.nrows() {
            for c in 0..k.ncols() {
                if c > 0 {
                    out.push(' ');
                }
                write!(out, "{:.16e} {:.16e}", clean(k[(r, c)].re), clean(k[(r, c)].im)).expect("string write");
            }
            out.push('\n');
        }
    }
    out
}

/// Splits a CLI mode-label list: commas and whitespace separate labels, and
/// a single run of plain letters like `acb` means one label per letter.
/// Multi-character labels (`b_up`) therefore need explicit separators.
pub fn split_labels(s: &str) -> Vec<String> {
    let parts: Vec<&str> = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
        .collect();
    if parts.len() == 1 {
        let lone = parts[0];
        if lone.len() > 1 && lone.chars().all(|c| c.is_ascii_alphabetic()) {
            return lone.chars().map(String::from).collect();
        }
    }
    parts.into_iter().map(String::from).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{erasure_channel, grassmann_output_state, AccelerationParam, ErasureParams};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn state_round_trips_exactly() {
        let order = ModeOrder::new(["a", "b", "c"]).unwrap();
        let v = FockVector::from_terms(
            order,
            [
                (BasisState::from_bit_str("100").unwrap(), c(0.5, 0.0)),
                (BasisState::from_bit_str("010").unwrap(), c(0.5, -1.0 / 3.0)),
                (BasisState::from_bit_str("101").unwrap(), c(-0.25, 1e-7)),
            ],
        )
        .unwrap();
        let text = write_state(&v);
        let back = parse_state(&text).unwrap();
        assert_eq!(back.order().labels(), v.order().labels());
        for (bs, amp) in v.terms() {
            assert_eq!(back.amplitude(bs), amp);
        }
        assert_eq!(back.num_terms(), v.num_terms());
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# a three mode state\n\nmodes: a b c\n0.5 0.0 |100>  # first term\n\n0.5 0.0 |010>\n";
        let v = parse_state(text).unwrap();
        assert_eq!(v.num_terms(), 2);
    }

    #[test]
    fn duplicate_term_lines_accumulate() {
        let text = "modes: a b\n0.25 0.0 |10>\n0.5 0.0 |10>\n";
        let v = parse_state(text).unwrap();
        assert_eq!(v.amplitude(BasisState::from_bit_str("10").unwrap()), c(0.75, 0.0));
    }

    #[test]
    fn state_parse_errors_carry_position() {
        assert!(matches!(parse_state(""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_state("modes:\n"), Err(Error::Parse { .. })));
        let bad_float = parse_state("modes: a b\n0.5 x |10>\n");
        match bad_float {
            Err(Error::Parse { line: 2, col: 5, .. }) => {}
            other => panic!("expected line 2 col 5, got {other:?}"),
        }
        assert!(parse_state("modes: a b\n0.5 0.0 |101>\n").is_err());
        assert!(parse_state("modes: a b\n0.5 0.0 10\n").is_err());
        assert!(parse_state("modes: a a\n").is_err());
    }

    #[test]
    fn density_round_trips_exactly() {
        let rho = grassmann_output_state(AccelerationParam::new(0.4).unwrap());
        let text = write_density(&rho);
        let back = parse_density(&text).unwrap();
        assert_eq!(back.matrix(), rho.matrix());
        assert_eq!(back.order().labels(), rho.order().labels());
    }

    #[test]
    fn fully_traced_density_round_trips() {
        let rho = grassmann_output_state(AccelerationParam::new(0.2).unwrap());
        let scalar = rho.partial_trace(["a", "b"]).unwrap();
        assert_eq!(scalar.dim(), 1);
        let text = write_density(&scalar);
        let back = parse_density(&text).unwrap();
        assert_eq!(back.matrix(), scalar.matrix());
        assert!(back.order().is_empty());
    }

    #[test]
    fn density_parse_errors_carry_position() {
        assert!(parse_density("modes: a b\n").is_err());
        assert!(parse_density("modes: a b\ndim: 3\n").is_err());
        let short = "modes: a\ndim: 2\n1.0 0.0 0.0 0.0\n";
        assert!(matches!(parse_density(short), Err(Error::Parse { .. })));
        let extra = "modes: a\ndim: 2\n0.5 0.0 0.0 0.0\n0.0 0.0 0.5 0.0\n0.0 0.0\n";
        assert!(matches!(parse_density(extra), Err(Error::Parse { .. })));
    }

    #[test]
    fn density_domain_errors_pass_through() {
        let text = "modes: a\ndim: 2\n1.0 0.0 0.5 0.0\n0.0 0.0 0.0 0.0\n";
        assert!(matches!(parse_density(text), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn channel_round_trips_exactly() {
        let ch = erasure_channel(ErasureParams::new(0.3).unwrap());
        let text = write_channel(&ch);
        let back = parse_channel(&text).unwrap();
        assert_eq!(back.kraus(), ch.kraus());
    }

    #[test]
    fn channel_parse_rejects_bad_counts_and_incomplete_sets() {
        assert!(parse_channel("kraus: 0\n").is_err());
        assert!(parse_channel("kraus: 2\ndim: 1 1\n1.0 0.0\n").is_err());
        let incomplete = "kraus: 1\ndim: 1 1\n0.5 0.0\n";
        assert!(matches!(parse_channel(incomplete), Err(Error::BadChannel(_))));
    }

    #[test]
    fn label_lists_split_on_commas_whitespace_and_letter_runs() {
        assert_eq!(split_labels("a,b"), ["a", "b"]);
        assert_eq!(split_labels("a c b"), ["a", "c", "b"]);
        assert_eq!(split_labels("acb"), ["a", "c", "b"]);
        assert_eq!(split_labels("b_up"), ["b_up"]);
        assert_eq!(split_labels("a_up,a_dn"), ["a_up", "a_dn"]);
        assert_eq!(split_labels(" a , c "), ["a", "c"]);
        assert!(split_labels("").is_empty());
    }

    #[test]
    fn shipped_fixtures_parse_and_classify_as_documented() {
        let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures");
        let read = |name: &str| std::fs::read_to_string(format!("{root}/{name}")).unwrap();

        for name in ["phi_three_mode.state", "psi_mixed_ab.state", "psi_mixed_ba.state"] {
            let v = parse_state(&read(name)).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-14, "{name}");
            assert!(!v.ssr_check().is_valid(), "{name}");
        }
        for name in ["omega_pair_ab.state", "omega_dirac.state"] {
            let v = parse_state(&read(name)).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-14, "{name}");
            assert!(v.ssr_check().is_valid(), "{name}");
        }
        for name in ["unruh_r0.rho", "unruh_rpi8.rho", "unruh_rpi4.rho"] {
            let rho = parse_density(&read(name)).unwrap();
            assert!(rho.ssr_check().is_valid(), "{name}");
        }

        let pi8 = parse_density(&read("unruh_rpi8.rho")).unwrap();
        let exact = grassmann_output_state(AccelerationParam::new(std::f64::consts::PI / 8.0).unwrap());
        assert!((pi8.matrix() - exact.matrix()).iter().all(|d| d.norm() < 1e-15));
    }

    proptest! {
        #[test]
        fn prop_state_round_trip(codes in proptest::collection::btree_set(0usize..16, 1..6),
                                 res in proptest::collection::vec(-1.0f64..1.0, 6),
                                 ims in proptest::collection::vec(-1.0f64..1.0, 6)) {
            let order = ModeOrder::new(["a", "b", "c", "d"]).unwrap();
            let terms: Vec<_> = codes
                .iter()
                .zip(res.iter().zip(&ims))
                .map(|(&code, (&re, &im))| (BasisState::new(code, 4), c(re, im)))
                .collect();
            let v = FockVector::from_terms(order, terms).unwrap();
            let back = parse_state(&write_state(&v)).unwrap();
            prop_assert_eq!(back.num_terms(), v.num_terms());
            for (bs, amp) in v.terms() {
                prop_assert_eq!(back.amplitude(bs), amp);
            }
        }
    }
}
