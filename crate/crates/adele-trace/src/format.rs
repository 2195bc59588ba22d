//! JSON documents for test functions, Poisson inputs, local functions and
//! characters.
//!
//! Rationals are strings such as `"-3/4"`. Cyclotomic numbers are either a
//! rational string or a list of `{angle, coeff}` terms meaning
//! `Σ coeff·e(angle)`. Floats are plain JSON numbers.

use std::collections::BTreeSet;

use adele_trace_core::{
    Angle, ArchAtom, ArchFunction, Cyclotomic, DirichletCharacter, HeckeAtom, HeckeElement, LocalFactor, LocalSb,
    PadicBall, PoissonInput, Prime, Rational, TwistedBall, UnitFunction,
};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("at {path}: {message}")]
    Invalid { path: String, message: String },
}

impl FormatError {
    fn invalid(path: &str, message: impl ToString) -> FormatError {
        FormatError::Invalid { path: path.to_string(), message: message.to_string() }
    }
}

type Result<T> = std::result::Result<T, FormatError>;

/// Deserialize with the JSON path of the first structural error.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            FormatError::Syntax { line: inner.line(), column: inner.column(), message: inner.to_string() }
        } else {
            FormatError::Invalid { path: if path == "." { "$".into() } else { format!("$.{path}") }, message: inner.to_string() }
        }
    })?;
    Ok(value)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

// ---------------------------------------------------------------- documents

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CyclotomicDoc {
    Rational(String),
    Terms(Vec<CyclotomicTermDoc>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CyclotomicTermDoc {
    pub angle: String,
    pub coeff: String,
}

fn one_doc() -> CyclotomicDoc {
    CyclotomicDoc::Rational("1".into())
}

fn zero_string() -> String {
    "0".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SbAtomDoc {
    #[serde(default = "one_doc")]
    pub coeff: CyclotomicDoc,
    #[serde(default = "zero_string")]
    pub twist: String,
    #[serde(default = "zero_string")]
    pub center: String,
    pub level: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitAtomDoc {
    #[serde(default = "one_doc")]
    pub coeff: CyclotomicDoc,
    pub center: String,
    pub level: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalSbDoc {
    pub p: u64,
    pub atoms: Vec<SbAtomDoc>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchAtomDoc {
    pub amp_re: f64,
    #[serde(default)]
    pub amp_im: f64,
    pub width: f64,
    #[serde(default)]
    pub shift: f64,
    #[serde(default)]
    pub modulation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalDoc {
    pub p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<Vec<UnitAtomDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub additive: Option<Vec<SbAtomDoc>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeckeAtomDoc {
    #[serde(default = "unit_complex")]
    pub coeff: ComplexDoc,
    pub q: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub locals: Vec<LocalDoc>,
    #[serde(default = "standard_arch")]
    pub arch: Vec<ArchAtomDoc>,
}

fn unit_complex() -> ComplexDoc {
    ComplexDoc { re: 1.0, im: 0.0 }
}

fn standard_arch() -> Vec<ArchAtomDoc> {
    vec![ArchAtomDoc { amp_re: 1.0, amp_im: 0.0, width: 1.0, shift: 0.0, modulation: 0.0 }]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeckeDoc {
    pub atoms: Vec<HeckeAtomDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoissonLocalDoc {
    pub p: u64,
    pub additive: Vec<SbAtomDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoissonDoc {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub locals: Vec<PoissonLocalDoc>,
    #[serde(default = "standard_arch")]
    pub arch: Vec<ArchAtomDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorImageDoc {
    pub gen: u64,
    pub angle: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterDoc {
    pub modulus: u64,
    pub generator_images: Vec<GeneratorImageDoc>,
}

// ------------------------------------------------------------ doc -> value

fn parse_rational(s: &str, path: &str) -> Result<Rational> {
    s.trim().parse::<Rational>().map_err(|e| FormatError::invalid(path, format!("bad rational {s:?}: {e}")))
}

fn parse_prime(p: u64, path: &str) -> Result<Prime> {
    Prime::new(p).map_err(|e| FormatError::invalid(path, e))
}

fn parse_angle(s: &str, path: &str) -> Result<Angle> {
    Angle::from_rational(&parse_rational(s, path)?).map_err(|e| FormatError::invalid(path, e))
}

pub fn parse_cyclotomic(doc: &CyclotomicDoc, path: &str) -> Result<Cyclotomic> {
    match doc {
        CyclotomicDoc::Rational(s) => Ok(Cyclotomic::from_rational(parse_rational(s, path)?)),
        CyclotomicDoc::Terms(terms) => {
            let mut out = Vec::with_capacity(terms.len());
            for (i, t) in terms.iter().enumerate() {
                let here = format!("{path}[{i}]");
                out.push((parse_angle(&t.angle, &format!("{here}.angle"))?, parse_rational(&t.coeff, &format!("{here}.coeff"))?));
            }
            Cyclotomic::from_terms(out).map_err(|e| FormatError::invalid(path, e))
        }
    }
}

fn parse_sb_atoms(p: Prime, atoms: &[SbAtomDoc], path: &str) -> Result<LocalSb> {
    let mut f = LocalSb::zero(p);
    for (i, a) in atoms.iter().enumerate() {
        let here = format!("{path}[{i}]");
        let coeff = parse_cyclotomic(&a.coeff, &format!("{here}.coeff"))?;
        let twist = parse_rational(&a.twist, &format!("{here}.twist"))?;
        let center = parse_rational(&a.center, &format!("{here}.center"))?;
        let ball = PadicBall::new(p, center, a.level);
        f.add_atom(&TwistedBall::new(coeff, twist, ball)).map_err(|e| FormatError::invalid(&here, e))?;
    }
    Ok(f)
}

pub fn parse_local_sb(doc: &LocalSbDoc, path: &str) -> Result<LocalSb> {
    let p = parse_prime(doc.p, &format!("{path}.p"))?;
    parse_sb_atoms(p, &doc.atoms, &format!("{path}.atoms"))
}

fn parse_unit(p: Prime, atoms: &[UnitAtomDoc], path: &str) -> Result<UnitFunction> {
    let mut parsed = Vec::with_capacity(atoms.len());
    for (i, a) in atoms.iter().enumerate() {
        let here = format!("{path}[{i}]");
        let coeff = parse_cyclotomic(&a.coeff, &format!("{here}.coeff"))?;
        let center = parse_rational(&a.center, &format!("{here}.center"))?;
        let ball = PadicBall::new(p, center, a.level);
        if !ball.is_unit_coset() {
            return Err(FormatError::invalid(&here, format!("{ball} is not a coset inside Z_{p}^x (level must be >= 1)")));
        }
        parsed.push((coeff, ball));
    }
    UnitFunction::from_atoms(p, parsed).map_err(|e| FormatError::invalid(path, e))
}

pub fn parse_arch(atoms: &[ArchAtomDoc], path: &str) -> Result<ArchFunction> {
    let mut out = Vec::with_capacity(atoms.len());
    for (i, a) in atoms.iter().enumerate() {
        let atom = ArchAtom::new(Complex64::new(a.amp_re, a.amp_im), a.width, a.shift, a.modulation)
            .map_err(|e| FormatError::invalid(&format!("{path}[{i}]"), e))?;
        out.push(atom);
    }
    ArchFunction::new(out).map_err(|e| FormatError::invalid(path, e))
}

fn check_distinct_primes<'a>(ps: impl Iterator<Item = &'a u64>, path: &str) -> Result<()> {
    let mut seen = BTreeSet::new();
    for (i, p) in ps.enumerate() {
        if !seen.insert(*p) {
            return Err(FormatError::invalid(&format!("{path}[{i}].p"), format!("duplicate entry for p = {p}")));
        }
    }
    Ok(())
}

pub fn parse_hecke(doc: &HeckeDoc) -> Result<HeckeElement> {
    let mut atoms = Vec::with_capacity(doc.atoms.len());
    for (i, a) in doc.atoms.iter().enumerate() {
        let here = format!("$.atoms[{i}]");
        let q = parse_rational(&a.q, &format!("{here}.q"))?;
        if q == Rational::from_integer(0.into()) {
            return Err(FormatError::invalid(&format!("{here}.q"), "q must be a nonzero rational"));
        }
        let coeff = Complex64::new(a.coeff.re, a.coeff.im);
        check_distinct_primes(a.locals.iter().map(|l| &l.p), &format!("{here}.locals"))?;
        let mut locals = Vec::with_capacity(a.locals.len());
        for (j, l) in a.locals.iter().enumerate() {
            let lp = format!("{here}.locals[{j}]");
            let p = parse_prime(l.p, &format!("{lp}.p"))?;
            let unit = match &l.unit {
                Some(u) => parse_unit(p, u, &format!("{lp}.unit"))?,
                None => UnitFunction::one(p),
            };
            let additive = match &l.additive {
                Some(f) => parse_sb_atoms(p, f, &format!("{lp}.additive"))?,
                None => LocalSb::unit_ball(p),
            };
            locals.push(LocalFactor::new(unit, additive).map_err(|e| FormatError::invalid(&lp, e))?);
        }
        let arch = parse_arch(&a.arch, &format!("{here}.arch"))?;
        atoms.push(HeckeAtom::new(coeff, q, locals, arch).map_err(|e| FormatError::invalid(&here, e))?);
    }
    Ok(HeckeElement::new(atoms))
}

pub fn parse_poisson(doc: &PoissonDoc) -> Result<PoissonInput> {
    check_distinct_primes(doc.locals.iter().map(|l| &l.p), "$.locals")?;
    let mut locals = Vec::with_capacity(doc.locals.len());
    for (j, l) in doc.locals.iter().enumerate() {
        let lp = format!("$.locals[{j}]");
        let p = parse_prime(l.p, &format!("{lp}.p"))?;
        locals.push(parse_sb_atoms(p, &l.additive, &format!("{lp}.additive"))?);
    }
    let arch = parse_arch(&doc.arch, "$.arch")?;
    PoissonInput::new(locals, arch).map_err(|e| FormatError::invalid("$", e))
}

pub fn parse_character(doc: &CharacterDoc, path: &str) -> Result<DirichletCharacter> {
    let mut pairs = Vec::with_capacity(doc.generator_images.len());
    for (i, g) in doc.generator_images.iter().enumerate() {
        pairs.push((g.gen, parse_angle(&g.angle, &format!("{path}.generator_images[{i}].angle"))?));
    }
    DirichletCharacter::from_generator_images(doc.modulus, &pairs).map_err(|e| FormatError::invalid(path, e))
}

pub fn hecke_from_json(text: &str) -> Result<HeckeElement> {
    parse_hecke(&from_json(text)?)
}

pub fn poisson_from_json(text: &str) -> Result<PoissonInput> {
    parse_poisson(&from_json(text)?)
}

/// A local function document; `p` must match when given on the command line.
pub fn local_sb_from_json(text: &str) -> Result<LocalSb> {
    parse_local_sb(&from_json(text)?, "$")
}

// ------------------------------------------------------------ value -> doc

pub fn cyclotomic_doc(c: &Cyclotomic) -> CyclotomicDoc {
    match c.as_rational() {
        Some(r) => CyclotomicDoc::Rational(r.to_string()),
        None => CyclotomicDoc::Terms(
            c.terms()
                .map(|(a, r)| CyclotomicTermDoc { angle: a.to_rational().to_string(), coeff: r.to_string() })
                .collect(),
        ),
    }
}

fn sb_atoms_doc(f: &LocalSb) -> Vec<SbAtomDoc> {
    f.atoms()
        .into_iter()
        .map(|a| SbAtomDoc {
            coeff: cyclotomic_doc(&a.coeff),
            twist: a.twist.to_string(),
            center: a.ball.center().to_string(),
            level: a.ball.level(),
        })
        .collect()
}

pub fn local_sb_doc(f: &LocalSb) -> LocalSbDoc {
    LocalSbDoc { p: f.p().get(), atoms: sb_atoms_doc(f) }
}

fn unit_doc(g: &UnitFunction) -> Vec<UnitAtomDoc> {
    g.atoms()
        .into_iter()
        .map(|(c, b)| UnitAtomDoc { coeff: cyclotomic_doc(&c), center: b.center().to_string(), level: b.level() })
        .collect()
}

pub fn arch_doc(f: &ArchFunction) -> Vec<ArchAtomDoc> {
    f.atoms()
        .iter()
        .map(|a| ArchAtomDoc {
            amp_re: a.amp.re,
            amp_im: a.amp.im,
            width: a.width,
            shift: a.shift,
            modulation: a.modulation,
        })
        .collect()
}

pub fn hecke_doc(h: &HeckeElement) -> HeckeDoc {
    HeckeDoc {
        atoms: h
            .atoms()
            .iter()
            .map(|a| HeckeAtomDoc {
                coeff: ComplexDoc { re: a.coeff.re, im: a.coeff.im },
                q: a.q().to_string(),
                locals: a
                    .locals()
                    .map(|f| LocalDoc {
                        p: f.p().get(),
                        unit: (!f.unit.is_one()).then(|| unit_doc(&f.unit)),
                        additive: (!f.additive.is_unit_ball()).then(|| sb_atoms_doc(&f.additive)),
                    })
                    .collect(),
                arch: arch_doc(&a.arch),
            })
            .collect(),
    }
}

pub fn poisson_doc(phi: &PoissonInput) -> PoissonDoc {
    PoissonDoc {
        locals: phi.locals().map(|f| PoissonLocalDoc { p: f.p().get(), additive: sb_atoms_doc(f) }).collect(),
        arch: arch_doc(&phi.arch),
    }
}

pub fn character_doc(chi: &DirichletCharacter) -> CharacterDoc {
    CharacterDoc {
        modulus: chi.modulus(),
        generator_images: chi
            .generator_images()
            .into_iter()
            .map(|(gen, a)| GeneratorImageDoc { gen, angle: a.to_rational().to_string() })
            .collect(),
    }
}

pub fn hecke_to_json(h: &HeckeElement) -> String {
    to_json(&hecke_doc(h))
}

pub fn poisson_to_json(phi: &PoissonInput) -> String {
    to_json(&poisson_doc(phi))
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEFAULT_H: &str = r#"{"atoms":[{"coeff":{"re":1.0,"im":0.0},"q":"1",
        "arch":[{"amp_re":1.0,"amp_im":0.0,"width":1.0,"shift":0.0,"modulation":0.0}]}]}"#;

    #[test]
    fn default_document() {
        let h = hecke_from_json(DEFAULT_H).unwrap();
        assert_eq!(h, HeckeElement::standard());
        assert_eq!(h.atoms()[0].locals().count(), 0);
        assert_eq!(hecke_from_json(r#"{"atoms":[{"q":"1"}]}"#).unwrap(), h);
    }

    #[test]
    fn zero_q_is_rejected_with_a_path() {
        let err = hecke_from_json(r#"{"atoms":[{"q":"1"},{"q":"0"}]}"#).unwrap_err();
        assert_eq!(err.to_string(), "at $.atoms[1].q: q must be a nonzero rational");
    }

    #[test]
    fn structural_errors_carry_paths() {
        let err = hecke_from_json(r#"{"atoms":[{"q":"1","locals":[{"p":2,"additive":[{"level":"x"}]}]}]}"#).unwrap_err();
        match err {
            FormatError::Invalid { path, .. } => assert_eq!(path, "$.atoms[0].locals[0].additive[0].level"),
            other => panic!("{other}"),
        }
        let err = hecke_from_json(r#"{"atoms":[{"q":"1","locals":[{"p":4}]}]}"#).unwrap_err();
        assert_eq!(err.to_string(), "at $.atoms[0].locals[0].p: 4 is not a prime");
        assert!(matches!(hecke_from_json("{\"atoms\": [").unwrap_err(), FormatError::Syntax { .. }));
    }

    #[test]
    fn unit_levels_must_be_positive() {
        let err = hecke_from_json(r#"{"atoms":[{"q":"1","locals":[{"p":3,"unit":[{"center":"1","level":0}]}]}]}"#)
            .unwrap_err();
        assert!(err.to_string().starts_with("at $.atoms[0].locals[0].unit[0]:"), "{err}");
    }

    #[test]
    fn cyclotomic_round_trip() {
        let doc: CyclotomicDoc = from_json(r#"[{"angle":"1/3","coeff":"2"},{"angle":"0","coeff":"-1/2"}]"#).unwrap();
        let c = parse_cyclotomic(&doc, "$").unwrap();
        assert_eq!(parse_cyclotomic(&cyclotomic_doc(&c), "$").unwrap(), c);
        let doc: CyclotomicDoc = from_json(r#""-3/4""#).unwrap();
        assert_eq!(cyclotomic_doc(&parse_cyclotomic(&doc, "$").unwrap()), CyclotomicDoc::Rational("-3/4".into()));
    }

    #[test]
    fn canonical_round_trip() {
        let text = r#"{"atoms":[
            {"coeff":{"re":0.5,"im":-1.0},"q":"-2/3",
             "locals":[{"p":3,"unit":[{"center":"2","level":1}]},
                       {"p":2,"additive":[{"coeff":"1","twist":"1/4","center":"1/2","level":1}]}],
             "arch":[{"amp_re":1.0,"width":0.5,"shift":0.25,"modulation":-1.0}]},
            {"q":"1","locals":[{"p":5,"additive":[{"center":"0","level":-1}]}]},
            {"q":"6"}]}"#;
        let h = hecke_from_json(text).unwrap();
        let canonical = hecke_to_json(&h);
        let again = hecke_from_json(&canonical).unwrap();
        assert_eq!(again, h);
        assert_eq!(hecke_to_json(&again), canonical);
    }

    #[test]
    fn poisson_document() {
        let phi = poisson_from_json(r#"{"locals":[{"p":2,"additive":[{"level":1}]}]}"#).unwrap();
        assert_eq!(phi.locals().count(), 1);
        let back = poisson_from_json(&poisson_to_json(&phi)).unwrap();
        assert_eq!(back, phi);
    }

    #[test]
    fn character_document() {
        let doc: CharacterDoc = from_json(r#"{"modulus":12,"generator_images":[{"gen":7,"angle":"1/2"},{"gen":5,"angle":"0"}]}"#).unwrap();
        let chi = parse_character(&doc, "$").unwrap();
        assert_eq!(character_doc(&chi), doc);
    }
}
