use std::collections::HashMap;
use std::fmt;

use super::complex::{FilteredComplex, Simplex};

/// One broken invariant of a filtered complex.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// `face` is a face of `simplex` but is not listed.
    MissingFace { simplex: Simplex, face: Simplex },
    /// `face ⊆ coface` but `f(face)[axis] > f(coface)[axis]`.
    NotMonotone {
        face: Simplex,
        coface: Simplex,
        axis: usize,
        face_value: f64,
        coface_value: f64,
    },
    Duplicate { simplex: Simplex },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingFace { simplex, face } => {
                write!(f, "face closure: {simplex} is listed but its face {face} is not")
            }
            Violation::NotMonotone {
                face,
                coface,
                axis,
                face_value,
                coface_value,
            } => write!(
                f,
                "monotonicity on axis {axis}: f({face}) = {face_value} > f({coface}) = {coface_value}"
            ),
            Violation::Duplicate { simplex } => write!(f, "duplicate simplex {simplex}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Reports every face-closure, monotonicity and duplication violation.
///
/// Only facets are checked for each simplex: if every listed simplex has its
/// facets listed, closure holds for all faces by induction, and monotonicity
/// along facets implies monotonicity along every face relation.
pub fn validate_complex(c: &FilteredComplex) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut index: HashMap<&Simplex, usize> = HashMap::with_capacity(c.len());
    for (i, s) in c.simplices().iter().enumerate() {
        if index.insert(s, i).is_some() {
            report
                .violations
                .push(Violation::Duplicate { simplex: s.clone() });
        }
    }
    let values = c.values();
    for (i, s) in c.simplices().iter().enumerate() {
        for facet in s.facets() {
            match index.get(&facet) {
                None => report.violations.push(Violation::MissingFace {
                    simplex: s.clone(),
                    face: facet,
                }),
                Some(&j) => {
                    for (axis, (a, b)) in values[j].coords().iter().zip(values[i].coords()).enumerate() {
                        if a > b {
                            report.violations.push(Violation::NotMonotone {
                                face: facet.clone(),
                                coface: s.clone(),
                                axis,
                                face_value: *a,
                                coface_value: *b,
                            });
                        }
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::FiltrationValue;

    fn fv(x: &[f64]) -> FiltrationValue {
        FiltrationValue(x.to_vec())
    }

    #[test]
    fn missing_endpoint_is_reported() {
        let c = FilteredComplex::from_parts_unchecked(
            1,
            2,
            vec![
                (Simplex::vertex(0), fv(&[0.0])),
                (Simplex::new(vec![0, 1]).unwrap(), fv(&[1.0])),
            ],
        )
        .unwrap();
        let r = validate_complex(&c);
        assert_eq!(
            r.violations,
            vec![Violation::MissingFace {
                simplex: Simplex::new(vec![0, 1]).unwrap(),
                face: Simplex::vertex(1),
            }]
        );
        assert!(r.to_string().contains("{1}"));
    }

    #[test]
    fn edge_below_endpoint_names_axis() {
        let c = FilteredComplex::from_parts_unchecked(
            2,
            2,
            vec![
                (Simplex::vertex(0), fv(&[0.0, 0.0])),
                (Simplex::vertex(1), fv(&[0.0, 3.0])),
                (Simplex::new(vec![0, 1]).unwrap(), fv(&[1.0, 2.0])),
            ],
        )
        .unwrap();
        let r = validate_complex(&c);
        assert_eq!(r.violations.len(), 1);
        match &r.violations[0] {
            Violation::NotMonotone { axis, face, .. } => {
                assert_eq!(*axis, 1);
                assert_eq!(face, &Simplex::vertex(1));
            }
            v => panic!("unexpected {v:?}"),
        }
        assert!(FilteredComplex::new(
            2,
            2,
            vec![
                (Simplex::vertex(0), fv(&[0.0, 0.0])),
                (Simplex::vertex(1), fv(&[0.0, 3.0])),
                (Simplex::new(vec![0, 1]).unwrap(), fv(&[1.0, 2.0])),
            ],
        )
        .is_err());
    }

    #[test]
    fn duplicates_are_reported() {
        let c = FilteredComplex::from_parts_unchecked(
            1,
            1,
            vec![
                (Simplex::vertex(0), fv(&[0.0])),
                (Simplex::vertex(0), fv(&[1.0])),
            ],
        )
        .unwrap();
        assert!(matches!(
            validate_complex(&c).violations[0],
            Violation::Duplicate { .. }
        ));
    }
}
