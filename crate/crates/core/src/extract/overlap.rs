use std::cmp::{Ordering, Reverse};

use super::types::{Annotation, Candidate};

/// Total preference order among competing candidates; `Less` means
/// `a` wins. Longer span, then individual-bearing, then higher priority
/// (gazetteer above every rule), then leftmost, then smaller rule name.
/// Concept, individual and normalized value break any remaining tie.
pub fn preference(a: &Candidate, b: &Candidate) -> Ordering {
    let key = |c: &Candidate| {
        let ann = &c.annotation;
        (
            Reverse(ann.span.len()),
            Reverse(ann.individual.is_some()),
            Reverse(c.priority),
            ann.span.start,
            ann.rule_name.clone().unwrap_or_default(),
        )
    };
    key(a).cmp(&key(b)).then_with(|| {
        let (x, y) = (&a.annotation, &b.annotation);
        (&x.concept, &x.individual, &x.normalized_value).cmp(&(&y.concept, &y.individual, &y.normalized_value))
    })
}

/// Keep a pairwise non-overlapping subset: candidates are taken in
/// preference order and dropped when they overlap an earlier winner.
/// The result is sorted by span.
pub fn resolve_overlaps(mut candidates: Vec<Candidate>) -> Vec<Annotation> {
    candidates.sort_by(preference);
    let mut kept: Vec<Annotation> = Vec::new();
    for c in candidates {
        if kept.iter().all(|k| !k.span.overlaps(&c.annotation.span)) {
            kept.push(c.annotation);
        }
    }
    kept.sort_by(|a, b| a.span.cmp(&b.span));
    kept
}
