//! Text rendering of formulas, e.g.
//! `Sum[i=0..j] S1[j, i] * (-1)^(j - i) * n^i`.

use num_traits::{One, Signed};

use crate::numbers::{format_rational, Rational};
use crate::recognizer::{Affine, ClosedForm, IndexPoly};
use crate::search::{FactorTemplate, Formula};
use crate::triangles::build_triangle;

/// `2*j - i + 3` style text for integer terms and a constant; `"0"` if empty.
pub fn linear_text(terms: &[(i64, &str)], constant: i64) -> String {
    let mut s = String::new();
    for &(c, name) in terms {
        if c == 0 {
            continue;
        }
        push_signed(&mut s, c < 0);
        let mag = c.unsigned_abs();
        if mag == 1 {
            s.push_str(name);
        } else {
            s.push_str(&format!("{mag}*{name}"));
        }
    }
    if constant != 0 {
        push_signed(&mut s, constant < 0);
        s.push_str(&constant.unsigned_abs().to_string());
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

fn push_signed(s: &mut String, negative: bool) {
    match (s.is_empty(), negative) {
        (true, true) => s.push('-'),
        (true, false) => {}
        (false, true) => s.push_str(" - "),
        (false, false) => s.push_str(" + "),
    }
}

/// Integer linear form `j_coeff*j + i_coeff*i + constant`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Linear {
    j: i64,
    i: i64,
    c: i64,
}

impl Linear {
    fn compose(&self, a: &Affine) -> Linear {
        Linear {
            j: a.slope * self.j,
            i: a.slope * self.i,
            c: a.slope * self.c + a.offset,
        }
    }
}

struct Names<'a> {
    j: &'a str,
    i: &'a str,
}

impl Names<'_> {
    fn linear(&self, l: &Linear) -> String {
        linear_text(&[(l.j, self.j), (l.i, self.i)], l.c)
    }

    fn index(&self, p: &IndexPoly, slope: i64) -> String {
        let c = p.coeffs();
        let at = |k: usize| c.get(k).copied().unwrap_or(0);
        let j2 = format!("{}^2", self.j);
        linear_text(&[(at(2), &j2), (at(1), self.j), (slope, self.i)], at(0))
    }
}

fn is_atomic(text: &str) -> bool {
    text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn wrap(text: String) -> String {
    if is_atomic(&text) {
        text
    } else {
        format!("({text})")
    }
}

fn rational_text(r: &Rational) -> String {
    let t = format_rational(r);
    if r.is_negative() || !r.is_integer() {
        format!("({t})")
    } else {
        t
    }
}

fn poly_text(coeffs: &[Rational], var: &str) -> String {
    let mut s = String::new();
    for (e, c) in coeffs.iter().enumerate().rev() {
        if c == &Rational::from_integer(0.into()) {
            continue;
        }
        push_signed(&mut s, c.is_negative());
        let mag = c.abs();
        let power = match e {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{e}"),
        };
        if e == 0 {
            s.push_str(&format_rational(&mag));
        } else if mag.is_one() {
            s.push_str(&power);
        } else {
            s.push_str(&format!("{}*{}", format_rational(&mag), power));
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

fn form_text(cf: &ClosedForm, arg: &Linear, names: &Names) -> String {
    match cf {
        ClosedForm::Const(c) => rational_text(c),
        ClosedForm::Poly(cs) => {
            let var = wrap(names.linear(arg));
            let text = poly_text(cs, &var);
            if cs.iter().filter(|c| !num_traits::Zero::is_zero(*c)).count() > 1 {
                format!("({text})")
            } else {
                text
            }
        }
        ClosedForm::Geometric { base, exponent } => {
            format!(
                "{}^{}",
                rational_text(base),
                wrap(names.linear(&arg.compose(exponent)))
            )
        }
        ClosedForm::Factorial(a) => format!("{}!", wrap(names.linear(&arg.compose(a)))),
        ClosedForm::SignAlt(a) => format!("(-1)^{}", wrap(names.linear(&arg.compose(a)))),
        ClosedForm::Inverse(inner) => {
            let text = form_text(inner, arg, names);
            if matches!(**inner, ClosedForm::Product(_)) {
                format!("1/({text})")
            } else {
                format!("1/{text}")
            }
        }
        ClosedForm::Product(parts) => parts
            .iter()
            .map(|p| form_text(p, arg, names))
            .collect::<Vec<_>>()
            .join(" * "),
    }
}

/// Closed form in one index `m`, rendered with `m` as the variable name.
pub fn closed_form_text(cf: &ClosedForm, var: &str) -> String {
    let names = Names { j: var, i: var };
    form_text(cf, &Linear { j: 1, i: 0, c: 0 }, &names)
}

/// Index polynomial in `j`, e.g. `j^2 - 1`.
pub fn index_poly_text(p: &IndexPoly, var: &str) -> String {
    Names { j: var, i: "i" }.index(p, 0)
}

/// Whether the slot is a fixed entry equal to one and can be left out.
fn is_unit_factor(t: &FactorTemplate) -> bool {
    if !t.is_fixed_position() {
        return false;
    }
    let (n, k) = t.position(0, 0);
    if !(0..=4096).contains(&n) {
        return false;
    }
    build_triangle(&t.triangle, n as usize + 1)
        .entry(n, k)
        .is_ok_and(|v| v.is_one())
}

pub fn formula_text(f: &Formula) -> String {
    let names = Names {
        j: &f.sequence_index,
        i: &f.summation_index,
    };
    let mut parts: Vec<String> = Vec::new();
    for t in &f.templates {
        if is_unit_factor(t) {
            continue;
        }
        parts.push(format!(
            "{}[{}, {}]",
            t.triangle.name,
            names.index(&t.upper, t.upper_slope),
            names.index(&t.lower, t.lower_slope)
        ));
    }
    if !f.rs1.is_one() {
        parts.push(form_text(&f.rs1, &Linear { j: 0, i: 1, c: 0 }, &names));
    }
    if !f.rs2.is_one() {
        parts.push(form_text(
            &f.rs2,
            &Linear {
                j: 1,
                i: -1,
                c: f.j0,
            },
            &names,
        ));
    }
    parts.push(format!("{}^{}", f.variable, f.summation_index));
    format!(
        "Sum[{}=0..{}] {}",
        f.summation_index,
        linear_text(&[(1, &f.sequence_index)], f.j0),
        parts.join(" * ")
    )
}
