//! Text serialization of polynomials and CSV dumps of sampled points.
//!
//! Polynomial files start with a header line
//! `# polyring kind=<float|exact> nvars=<n>` followed by one term per line in
//! canonical monomial order. Float terms are `c_re c_im e0 … e(n−1)`; exact
//! terms are `a b e0 … e(n−1)` for the coefficient `a + b·ω`, with `a` and `b`
//! written as `num/den`. Other lines starting with `#` are ignored.

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use coble_core::cyclo::CycloScalar;
use coble_core::poly::{Coefficient, CoefficientKind, Monomial, MultiPoly, MAX_VARS};
use coble_core::theta::{JacobianPoint, ProjectivePoint9};
use num_complex::Complex64;
use num_rational::BigRational;

/// Coefficients with a text form in the polyring format.
pub trait TextCoefficient: Coefficient + Sized {
    fn write_text(&self) -> String;
    fn parse_text(re: &str, im: &str) -> Result<Self>;
}

impl TextCoefficient for Complex64 {
    fn write_text(&self) -> String {
        // `{}` on f64 prints the shortest representation that parses back exactly
        format!("{} {}", self.re, self.im)
    }

    fn parse_text(re: &str, im: &str) -> Result<Self> {
        Ok(Complex64::new(re.parse()?, im.parse()?))
    }
}

fn rational_text(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl TextCoefficient for CycloScalar {
    fn write_text(&self) -> String {
        format!("{} {}", rational_text(&self.a), rational_text(&self.b))
    }

    fn parse_text(a: &str, b: &str) -> Result<Self> {
        let parse = |s: &str| s.parse::<BigRational>().with_context(|| format!("bad rational '{s}'"));
        Ok(CycloScalar::new(parse(a)?, parse(b)?))
    }
}

fn kind_name(kind: CoefficientKind) -> &'static str {
    match kind {
        CoefficientKind::Exact => "exact",
        CoefficientKind::Float => "float",
    }
}

pub fn write_polyring<C: TextCoefficient>(poly: &MultiPoly<C>) -> String {
    let mut out = format!("# polyring kind={} nvars={}\n", kind_name(C::KIND), poly.nvars());
    for (m, c) in poly.terms() {
        out.push_str(&c.write_text());
        for i in 0..poly.nvars() {
            out.push_str(&format!(" {}", m.exponent(i)));
        }
        out.push('\n');
    }
    out
}

/// Several polynomials in one file, separated by their header lines.
pub fn write_polyring_list<C: TextCoefficient>(polys: &[MultiPoly<C>]) -> String {
    polys.iter().map(write_polyring).collect()
}

pub fn read_polyring<C: TextCoefficient>(text: &str) -> Result<MultiPoly<C>> {
    let mut list = read_polyring_list(text)?;
    if list.len() != 1 {
        bail!("expected one polynomial, found {}", list.len());
    }
    Ok(list.remove(0))
}

pub fn read_polyring_list<C: TextCoefficient>(text: &str) -> Result<Vec<MultiPoly<C>>> {
    let mut out = Vec::new();
    let mut current: Option<(usize, Vec<(Monomial, C)>)> = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# polyring") {
            if let Some((n, terms)) = current.take() {
                out.push(MultiPoly::from_terms(n, terms)?);
            }
            current = Some((parse_header::<C>(rest).with_context(|| format!("line {}", lineno + 1))?, Vec::new()));
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let Some((nvars, terms)) = current.as_mut() else {
            bail!("line {}: term before header", lineno + 1);
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 + *nvars {
            bail!("line {}: expected {} fields, found {}", lineno + 1, 2 + *nvars, fields.len());
        }
        let c = C::parse_text(fields[0], fields[1]).with_context(|| format!("line {}", lineno + 1))?;
        let exps = fields[2..]
            .iter()
            .map(|e| e.parse::<u8>())
            .collect::<Result<Vec<u8>, _>>()
            .with_context(|| format!("line {}: bad exponent", lineno + 1))?;
        terms.push((Monomial::from_exponents(&exps)?, c));
    }
    if let Some((n, terms)) = current {
        out.push(MultiPoly::from_terms(n, terms)?);
    }
    Ok(out)
}

fn parse_header<C: Coefficient>(rest: &str) -> Result<usize> {
    let mut kind = None;
    let mut nvars = None;
    for field in rest.split_whitespace() {
        match field.split_once('=') {
            Some(("kind", k)) => kind = Some(k.to_string()),
            Some(("nvars", n)) => nvars = Some(n.parse::<usize>()?),
            _ => bail!("unknown header field '{field}'"),
        }
    }
    let expected = kind_name(C::KIND);
    match kind.as_deref() {
        Some(k) if k == expected => {}
        Some(k) => bail!("file holds {k} coefficients, expected {expected}"),
        None => bail!("header lacks kind"),
    }
    let nvars = nvars.context("header lacks nvars")?;
    if nvars == 0 || nvars > MAX_VARS {
        bail!("nvars = {nvars} outside 1..={MAX_VARS}");
    }
    Ok(nvars)
}

/// Header of the point CSV: `z0_re, z0_im, z1_re, z1_im`, then the real and
/// imaginary parts of the nine coordinates indexed by σ.
pub fn point_csv_header() -> Vec<String> {
    let mut h = vec!["z0_re".to_string(), "z0_im".into(), "z1_re".into(), "z1_im".into()];
    for i in 0..9 {
        let (s0, s1) = (i / 3, i % 3);
        h.push(format!("x{s0}{s1}_re"));
        h.push(format!("x{s0}{s1}_im"));
    }
    h
}

pub fn write_point_csv<W: Write>(out: W, points: &[(JacobianPoint, ProjectivePoint9)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(point_csv_header())?;
    for (z, x) in points {
        let mut row: Vec<String> = z.z.iter().flat_map(|c| [c.re.to_string(), c.im.to_string()]).collect();
        row.extend(x.coords().iter().flat_map(|c| [c.re.to_string(), c.im.to_string()]));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_point_csv(text: &str) -> Result<Vec<(JacobianPoint, [Complex64; 9])>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != point_csv_header() {
        bail!("unexpected CSV header");
    }
    let mut out = Vec::new();
    for record in r.records() {
        let v: Vec<f64> = record?.iter().map(str::parse).collect::<Result<_, _>>()?;
        let c = |i: usize| Complex64::new(v[2 * i], v[2 * i + 1]);
        let z = JacobianPoint::new(c(0), c(1));
        out.push((z, std::array::from_fn(|i| c(i + 2))));
    }
    Ok(out)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}
