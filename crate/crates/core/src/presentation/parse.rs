//! Line-oriented parser for presentation and Ore files.

use crate::error::{Error, Result};
use crate::linalg::{FieldSpec, Matrix, Scalar};

use super::poly::{NCPoly, Word};
use super::{OreSpec, Presentation};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Arrow,
}

struct Lexed {
    toks: Vec<(Tok, usize)>,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Lexed> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        match c {
            ' ' | '\t' | '\r' => i += 1,
            '+' => {
                toks.push((Tok::Plus, col));
                i += 1;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                toks.push((Tok::Arrow, col));
                i += 2;
            }
            '-' => {
                toks.push((Tok::Minus, col));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, col));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, col));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, col));
                i += 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                toks.push((Tok::Num(chars[start..i].iter().collect()), col));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                toks.push((Tok::Ident(chars[start..i].iter().collect()), col));
            }
            other => return Err(syntax(line, col, format!("unexpected character '{other}'"))),
        }
    }
    Ok(Lexed { toks })
}

/// Parses `±c*w ± c*w ...` into a polynomial over `names`.
fn parse_poly(
    lexed: &[(Tok, usize)],
    field: FieldSpec,
    names: &[String],
    line: usize,
    end_col: usize,
) -> Result<NCPoly> {
    let mut poly = NCPoly::zero(field);
    let mut pos = 0;
    let col_at = |p: usize| lexed.get(p).map_or(end_col, |t| t.1);
    if lexed.is_empty() {
        return Err(syntax(line, end_col, "expected a polynomial"));
    }
    let mut first = true;
    while pos < lexed.len() {
        let mut negative = false;
        match &lexed[pos].0 {
            Tok::Plus => pos += 1,
            Tok::Minus => {
                negative = true;
                pos += 1;
            }
            _ if first => {}
            _ => return Err(syntax(line, col_at(pos), "expected '+' or '-'")),
        }
        first = false;
        // coefficient
        let mut coeff = field.one();
        let mut have_coeff = false;
        if let Some((Tok::Num(n), c)) = lexed.get(pos) {
            let mut text = n.clone();
            pos += 1;
            if let Some((Tok::Slash, _)) = lexed.get(pos) {
                match lexed.get(pos + 1) {
                    Some((Tok::Num(d), _)) => {
                        text = format!("{text}/{d}");
                        pos += 2;
                    }
                    _ => return Err(syntax(line, col_at(pos + 1), "expected denominator")),
                }
            }
            coeff = field
                .parse_scalar(&text)
                .ok_or_else(|| syntax(line, *c, format!("invalid coefficient '{text}'")))?;
            have_coeff = true;
            if let Some((Tok::Star, _)) = lexed.get(pos) {
                pos += 1;
                if !matches!(lexed.get(pos), Some((Tok::Ident(_), _))) {
                    return Err(syntax(line, col_at(pos), "expected a generator after '*'"));
                }
            }
        }
        // word
        let mut letters: Vec<u16> = Vec::new();
        while let Some((Tok::Ident(name), c)) = lexed.get(pos) {
            let g = names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::Presentation(format!("line {line}, column {c}: unknown generator '{name}'")))?;
            pos += 1;
            let mut power = 1usize;
            if let Some((Tok::Caret, _)) = lexed.get(pos) {
                match lexed.get(pos + 1) {
                    Some((Tok::Num(e), ec)) => {
                        power = e
                            .parse()
                            .map_err(|_| syntax(line, *ec, "exponent too large"))?;
                        pos += 2;
                    }
                    _ => return Err(syntax(line, col_at(pos + 1), "expected exponent")),
                }
            }
            letters.extend(std::iter::repeat_n(g as u16, power));
            match lexed.get(pos) {
                Some((Tok::Star, _)) => {
                    pos += 1;
                    if !matches!(lexed.get(pos), Some((Tok::Ident(_), _))) {
                        return Err(syntax(line, col_at(pos), "expected a generator after '*'"));
                    }
                }
                _ => break,
            }
        }
        if letters.is_empty() && !have_coeff {
            return Err(syntax(line, col_at(pos), "expected a term"));
        }
        if negative {
            coeff = -coeff;
        }
        poly.add_term(Word(letters), coeff);
    }
    Ok(poly)
}

/// Parses a single polynomial expression (constants allowed) in the given
/// generators.
pub fn parse_polynomial(text: &str, field: FieldSpec, names: &[String]) -> Result<NCPoly> {
    let lexed = lex(text, 1, 1)?;
    if lexed.toks.len() == 1 && matches!(&lexed.toks[0].0, Tok::Num(n) if n == "0") {
        return Ok(NCPoly::zero(field));
    }
    parse_poly(&lexed.toks, field, names, 1, text.chars().count() + 1)
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(k) => &line[..k],
        None => line,
    }
}

/// Splits a line into its keyword and the remainder, with the column at
/// which the remainder starts (1-based).
fn keyword(line: &str) -> Option<(&str, &str, usize)> {
    let trimmed = line.trim_start();
    if trimmed.is_empty() {
        return None;
    }
    let lead = line.len() - trimmed.len();
    let end = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
    Some((&trimmed[..end], &trimmed[end..], lead + end + 1))
}

pub fn parse_presentation(text: &str) -> Result<Presentation> {
    let mut field: Option<FieldSpec> = None;
    let mut gens: Option<Vec<String>> = None;
    let mut rels = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let Some((kw, rest, col)) = keyword(strip_comment(raw)) else {
            continue;
        };
        match kw {
            "field" => {
                if field.is_some() {
                    return Err(syntax(line, 1, "field declared twice"));
                }
                let parts: Vec<&str> = rest.split_whitespace().collect();
                field = Some(match parts.as_slice() {
                    ["Q"] => FieldSpec::Rationals,
                    ["F", p] => {
                        let p: u64 = p
                            .parse()
                            .map_err(|_| syntax(line, col, format!("invalid characteristic '{p}'")))?;
                        FieldSpec::prime(p)?
                    }
                    _ => return Err(syntax(line, col, "expected 'Q' or 'F <p>'")),
                });
            }
            "gens" => {
                if gens.is_some() {
                    return Err(syntax(line, 1, "generators declared twice"));
                }
                let names: Vec<String> = rest.split_whitespace().map(str::to_owned).collect();
                for n in &names {
                    let ok = n.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                        && n.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'');
                    if !ok {
                        return Err(syntax(line, col, format!("invalid generator name '{n}'")));
                    }
                }
                gens = Some(names);
            }
            "rel" => {
                let f = field.ok_or_else(|| syntax(line, 1, "'rel' before 'field'"))?;
                let g = gens.as_ref().ok_or_else(|| syntax(line, 1, "'rel' before 'gens'"))?;
                let lexed = lex(rest, line, col)?;
                let end = col + rest.len();
                let p = parse_poly(&lexed.toks, f, g, line, end)?;
                rels.push((line, p));
            }
            other => return Err(syntax(line, 1, format!("unknown directive '{other}'"))),
        }
    }
    let field = field.ok_or_else(|| syntax(1, 1, "missing 'field' line"))?;
    let gens = gens.ok_or_else(|| syntax(1, 1, "missing 'gens' line"))?;
    for (line, r) in &rels {
        check_relation(r, *line)?;
    }
    Presentation::new(field, gens, rels.into_iter().map(|(_, r)| r).collect())
}

fn check_relation(r: &NCPoly, line: usize) -> Result<()> {
    if r.is_zero() {
        return Err(Error::Presentation(format!("line {line}: relation is zero")));
    }
    match r.homogeneous_degree() {
        None => Err(Error::Presentation(format!("line {line}: inhomogeneous relation"))),
        Some(d) if d < 2 => Err(Error::Presentation(format!(
            "line {line}: relation of degree {d} (relations must have degree at least 2)"
        ))),
        Some(_) => Ok(()),
    }
}

pub fn parse_ore(text: &str, p: &Presentation) -> Result<OreSpec> {
    let field = p.field;
    let n = p.generators.len();
    let mut sigma_rows: Vec<Option<Vec<Scalar>>> = vec![None; n];
    let mut delta: Vec<Option<NCPoly>> = vec![None; n];
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let Some((kw, rest, col)) = keyword(strip_comment(raw)) else {
            continue;
        };
        if kw != "sigma" && kw != "delta" {
            return Err(syntax(line, 1, format!("unknown directive '{kw}'")));
        }
        let lexed = lex(rest, line, col)?;
        let toks = &lexed.toks;
        let (gen, gcol) = match toks.first() {
            Some((Tok::Ident(name), c)) => (name.clone(), *c),
            _ => return Err(syntax(line, col, "expected a generator name")),
        };
        let g = p
            .generators
            .iter()
            .position(|x| *x == gen)
            .ok_or_else(|| Error::Ore(format!("line {line}, column {gcol}: unknown generator '{gen}'")))?;
        match toks.get(1) {
            Some((Tok::Arrow, _)) => {}
            Some((_, c)) => return Err(syntax(line, *c, "expected '->'")),
            None => return Err(syntax(line, col + rest.len(), "expected '->'")),
        }
        let end = col + rest.len();
        let body = &toks[2..];
        let image = if matches!(body, [(Tok::Num(z), _)] if z == "0") {
            NCPoly::zero(field)
        } else {
            parse_poly(body, field, &p.generators, line, end).map_err(|e| match e {
                Error::Presentation(m) => Error::Ore(m),
                other => other,
            })?
        };
        if kw == "sigma" {
            if sigma_rows[g].is_some() {
                return Err(Error::Ore(format!("line {line}: sigma({gen}) defined twice")));
            }
            if !image.is_zero() && image.homogeneous_degree() != Some(1) {
                return Err(Error::Ore(format!(
                    "line {line}: sigma({gen}) must be a linear combination of generators"
                )));
            }
            let mut row = vec![field.zero(); n];
            for (w, c) in image.terms() {
                row[w.0[0] as usize] = c.clone();
            }
            sigma_rows[g] = Some(row);
        } else {
            if delta[g].is_some() {
                return Err(Error::Ore(format!("line {line}: delta({gen}) defined twice")));
            }
            if !image.is_zero() && image.homogeneous_degree() != Some(2) {
                return Err(Error::Ore(format!(
                    "line {line}: delta({gen}) must be homogeneous of degree 2"
                )));
            }
            delta[g] = Some(image);
        }
    }
    let rows = sigma_rows
        .into_iter()
        .enumerate()
        .map(|(g, r)| {
            r.unwrap_or_else(|| {
                let mut row = vec![field.zero(); n];
                row[g] = field.one();
                row
            })
        })
        .collect();
    let sigma = Matrix::from_rows(field, rows)?;
    let sigma = if n == 0 { Matrix::zeros(field, 0, 0) } else { sigma };
    let delta = delta
        .into_iter()
        .map(|d| d.unwrap_or_else(|| NCPoly::zero(field)))
        .collect();
    OreSpec::new(p, sigma, delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_example_one() {
        let p = parse_presentation("field Q\ngens x y\nrel x*x*y\nrel y*y*x\n").unwrap();
        assert_eq!(p.generators, vec!["x", "y"]);
        assert_eq!(p.relations.len(), 2);
        assert_eq!(p.relations[0].homogeneous_degree(), Some(3));
    }

    #[test]
    fn free_algebra_without_relations() {
        let p = parse_presentation("field Q\ngens x").unwrap();
        assert_eq!(p.generators.len(), 1);
        assert!(p.relations.is_empty());
    }

    #[test]
    fn rejects_inhomogeneous() {
        let err = parse_presentation("field Q\ngens x y\nrel x*x - y").unwrap_err();
        assert!(err.to_string().contains("inhomogeneous"), "{err}");
    }

    #[test]
    fn rejects_low_degree_and_unknown_names() {
        assert!(parse_presentation("field Q\ngens x y\nrel x - y")
            .unwrap_err()
            .to_string()
            .contains("degree 1"));
        assert!(parse_presentation("field Q\ngens x y\nrel x*w")
            .unwrap_err()
            .to_string()
            .contains("unknown generator 'w'"));
    }

    #[test]
    fn rejects_composite_characteristic() {
        assert!(matches!(
            parse_presentation("field F 4\ngens x"),
            Err(Error::Field(_))
        ));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_presentation("field Q\ngens x y\nrel x*y + * x") {
            Err(Error::Syntax { line, column, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(column, 11);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn coefficients_and_powers() {
        let p = parse_presentation("field Q\ngens x y\nrel 3/2*x^2 - 2 y*x # comment").unwrap();
        let names = &p.generators;
        assert_eq!(p.relations[0].display(names).to_string(), "-2*y*x + 3/2*x*x");
    }

    #[test]
    fn parses_ore_example_one() {
        let p = parse_presentation("field Q\ngens x y\nrel x*x*y\nrel y*y*x\n").unwrap();
        let o = parse_ore(
            "sigma x -> y\nsigma y -> x\ndelta x -> x*y\ndelta y -> y*x\n",
            &p,
        )
        .unwrap();
        assert_eq!(o.sigma, Matrix::from_i64(FieldSpec::Rationals, &[&[0, 1], &[1, 0]]));
        assert_eq!(o.delta[0].display(&p.generators).to_string(), "x*y");
    }

    #[test]
    fn empty_ore_is_central() {
        let p = parse_presentation("field Q\ngens x y").unwrap();
        let o = parse_ore("", &p).unwrap();
        assert_eq!(o.sigma, Matrix::identity(FieldSpec::Rationals, 2));
        assert!(o.delta.iter().all(NCPoly::is_zero));
    }

    #[test]
    fn singular_sigma_rejected() {
        let p = parse_presentation("field Q\ngens x y").unwrap();
        let err = parse_ore("sigma x -> x + y\nsigma y -> x + y", &p).unwrap_err();
        assert!(err.to_string().contains("singular"), "{err}");
    }

    #[test]
    fn delta_degree_checked() {
        let p = parse_presentation("field Q\ngens x y").unwrap();
        assert!(parse_ore("delta x -> x", &p).is_err());
        assert!(parse_ore("delta x -> x*x*y", &p).is_err());
        assert!(parse_ore("delta q -> x*x", &p).is_err());
    }
}
