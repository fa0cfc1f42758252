use std::fmt;
use std::sync::LazyLock;

use rand::Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{ActionSpec, CommandItem};
use crate::rig::Side;

/// Range for rotation degrees the command leaves unspecified.
pub const DEFAULT_DEGREE_RANGE: (f64, f64) = (15.0, 90.0);

/// Signed model axis for translations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "+x")]
    PosX,
    #[serde(rename = "-x")]
    NegX,
    #[serde(rename = "+y")]
    PosY,
    #[serde(rename = "-y")]
    NegY,
    #[serde(rename = "+z")]
    PosZ,
    #[serde(rename = "-z")]
    NegZ,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::PosX => "+x",
            Direction::NegX => "-x",
            Direction::PosY => "+y",
            Direction::NegY => "-y",
            Direction::PosZ => "+z",
            Direction::NegZ => "-z",
        }
    }

    /// (axis index, sign).
    pub fn axis(self) -> (usize, f64) {
        match self {
            Direction::PosX => (0, 1.0),
            Direction::NegX => (0, -1.0),
            Direction::PosY => (1, 1.0),
            Direction::NegY => (1, -1.0),
            Direction::PosZ => (2, 1.0),
            Direction::NegZ => (2, -1.0),
        }
    }

    fn from_parts(negative: bool, axis: char) -> Self {
        match (axis, negative) {
            ('x', false) => Direction::PosX,
            ('x', true) => Direction::NegX,
            ('y', false) => Direction::PosY,
            ('y', true) => Direction::NegY,
            ('z', false) => Direction::PosZ,
            _ => Direction::NegZ,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The clause following a sub-command start, up to and including the first
/// run of punctuation.
static CLAUSE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[\s0-9.a-zA-Z+\-]*[,.;]*").expect("static pattern"));
static DEGREE_PHRASE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)[\sa-zA-Z]*[0-9.]+[\sa-zA-Z]*degrees?").expect("static pattern")
});
static NUMBER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[0-9.]+").expect("static pattern"));
static INTEGER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[0-9]+").expect("static pattern"));
static AXIS: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(?:^|[\s(])([+-]*)([xyz])\b").expect("static pattern"));
static SIDE_WORD: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(left|right)\b").expect("static pattern"));

fn clause_at(text: &str, start: usize) -> String {
    let tail: String = text.chars().skip(start).collect();
    CLAUSE
        .find(&tail)
        .map(|m| m.as_str().to_string())
        .unwrap_or_default()
}

fn parse_degrees(clause: &str) -> Option<f64> {
    let phrase = DEGREE_PHRASE.find(clause)?;
    let num = NUMBER.find(phrase.as_str())?;
    num.as_str().parse::<f64>().ok().filter(|d| d.is_finite())
}

fn parse_direction(clause: &str) -> Option<Direction> {
    let caps = AXIS.captures(clause)?;
    let negative = caps[1].chars().filter(|&c| c == '-').count() % 2 == 1;
    let axis = caps[2].to_ascii_lowercase().chars().next()?;
    Some(Direction::from_parts(negative, axis))
}

fn parse_side(span: &str) -> Option<Side> {
    let caps = SIDE_WORD.captures(span)?;
    Some(if caps[1].eq_ignore_ascii_case("left") {
        Side::Left
    } else {
        Side::Right
    })
}

/// Stage two: read the quantities of one sub-command from the original
/// text. Missing values are filled in this order, each from `rng`: side
/// (limbs only), degrees (rotations other than turns, uniform over
/// [`DEFAULT_DEGREE_RANGE`]), direction (translations, one of ±x, ±y).
/// Turns without degrees keep `-1` for the default full turn; counts
/// default to 1.
pub fn quantize_action<R: Rng + ?Sized>(item: &CommandItem, text: &str, rng: &mut R) -> ActionSpec {
    let clause = clause_at(text, item.start_idx);
    let span = item.span_text(text);
    let mut seeded = false;

    let side = if item.part.is_sided() {
        parse_side(&span).unwrap_or_else(|| {
            seeded = true;
            if rng.gen_bool(0.5) {
                Side::Left
            } else {
                Side::Right
            }
        })
    } else {
        Side::None
    };

    let degrees = if item.action.is_translation() {
        0.0
    } else {
        match parse_degrees(&clause) {
            Some(d) => d,
            None if item.action.is_turn() => -1.0,
            None => {
                seeded = true;
                let (lo, hi) = DEFAULT_DEGREE_RANGE;
                rng.gen_range(lo..=hi)
            }
        }
    };

    let (direction, count) = if item.action.is_translation() {
        let direction = parse_direction(&clause).unwrap_or_else(|| {
            seeded = true;
            [
                Direction::PosX,
                Direction::NegX,
                Direction::PosY,
                Direction::NegY,
            ][rng.gen_range(0..4)]
        });
        let count = INTEGER
            .find(&clause)
            .and_then(|m| m.as_str().parse::<u32>().ok())
            .unwrap_or(1)
            .max(1);
        (Some(direction), Some(count))
    } else {
        (None, None)
    };

    ActionSpec {
        action: item.action,
        part: item.part,
        side,
        degrees,
        direction,
        count,
        rng_seeded: seeded,
        span: (item.start_idx, item.end_idx),
    }
}
