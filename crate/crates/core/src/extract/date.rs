use chrono::NaiveDate;

use super::tokenize::{fold, Token, TokenKind};

/// Calendar precision of a normalized date.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Day,
    Month,
    Year,
}

const MONTHS: [(&str, u32); 14] = [
    ("janvier", 1),
    ("février", 2),
    ("fevrier", 2),
    ("mars", 3),
    ("avril", 4),
    ("mai", 5),
    ("juin", 6),
    ("juillet", 7),
    ("août", 8),
    ("aout", 8),
    ("septembre", 9),
    ("octobre", 10),
    ("novembre", 11),
    ("décembre", 12),
];

pub fn month_number(word: &str) -> Option<u32> {
    let w = fold(word);
    if w == "decembre" {
        return Some(12);
    }
    MONTHS.iter().find(|(name, _)| *name == w).map(|(_, m)| *m)
}

/// Normalize a French date mention to ISO form (`YYYY-MM-DD`, `YYYY-MM`
/// or `YYYY`). A four-digit number is the year, a one- or two-digit number
/// the day, and a month name the month. Returns `None` for impossible
/// dates or when no year is present.
pub fn normalize_date(tokens: &[Token]) -> Option<(String, Precision)> {
    let mut year = None;
    let mut month = None;
    let mut day = None;
    for t in tokens {
        match t.kind {
            TokenKind::Number if t.text.len() == 4 => year = t.text.parse::<i32>().ok(),
            TokenKind::Number if t.text.len() <= 2 => day = t.text.parse::<u32>().ok(),
            TokenKind::Word => {
                if let Some(m) = month_number(&t.text) {
                    month = Some(m);
                }
            }
            _ => {}
        }
    }
    let year = year?;
    match (month, day) {
        (Some(m), Some(d)) => {
            let date = NaiveDate::from_ymd_opt(year, m, d)?;
            Some((date.format("%Y-%m-%d").to_string(), Precision::Day))
        }
        (Some(m), None) => Some((format!("{year:04}-{m:02}"), Precision::Month)),
        (None, None) => Some((format!("{year:04}"), Precision::Year)),
        (None, Some(_)) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::super::tokenize::tokenize;
    use super::*;

    fn norm(s: &str) -> Option<(String, Precision)> {
        normalize_date(&tokenize(s))
    }

    #[test]
    fn precisions() {
        assert_eq!(norm("12 janvier 2011"), Some(("2011-01-12".into(), Precision::Day)));
        assert_eq!(norm("janvier 2011"), Some(("2011-01".into(), Precision::Month)));
        assert_eq!(norm("2011"), Some(("2011".into(), Precision::Year)));
        assert_eq!(norm("1er Août 2012"), Some(("2012-08-01".into(), Precision::Day)));
        assert_eq!(norm("3 Décembre 1999"), Some(("1999-12-03".into(), Precision::Day)));
    }

    #[test]
    fn impossible_dates() {
        assert_eq!(norm("31 février 2011"), None);
        assert_eq!(norm("12 janvier"), None);
    }
}
