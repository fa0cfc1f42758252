//! Two-stage command interpreter.
//!
//! Stage one ([`extract_commands`]) finds every supported sub-command in a
//! free-text instruction and records its verb, body part and character span.
//! The sorted list travels between stages as `command.txt`. Stage two
//! ([`quantize_action`]) reads degrees, sides, directions and counts from
//! the text around each span, filling gaps from a seeded generator.

mod command_file;
mod extract;
mod quantize;

pub use command_file::{parse_command_file, read_command_file, render_command_file, write_command_file};
pub use extract::{extract_commands, extract_commands_unsorted};
pub use quantize::{quantize_action, Direction, DEFAULT_DEGREE_RANGE};

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rig::Side;

#[derive(Debug, Error, PartialEq)]
pub enum CmdError {
    #[error("command file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("cannot write {path}: {message}")]
    Write { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Move,
    Walk,
    Run,
    TurnLeft,
    TurnRight,
    Raise,
    Bow,
    Shake,
    LookLeft,
    LookRight,
    PutDown,
    Wave,
    Lift,
}

impl Action {
    pub const ALL: [Action; 13] = [
        Action::Move,
        Action::Walk,
        Action::Run,
        Action::TurnLeft,
        Action::TurnRight,
        Action::Raise,
        Action::Bow,
        Action::Shake,
        Action::LookLeft,
        Action::LookRight,
        Action::PutDown,
        Action::Wave,
        Action::Lift,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Action::Move => "move",
            Action::Walk => "walk",
            Action::Run => "run",
            Action::TurnLeft => "turn_left",
            Action::TurnRight => "turn_right",
            Action::Raise => "raise",
            Action::Bow => "bow",
            Action::Shake => "shake",
            Action::LookLeft => "look_left",
            Action::LookRight => "look_right",
            Action::PutDown => "put_down",
            Action::Wave => "wave",
            Action::Lift => "lift",
        }
    }

    pub fn is_translation(self) -> bool {
        matches!(self, Action::Move | Action::Walk | Action::Run)
    }

    pub fn is_turn(self) -> bool {
        matches!(self, Action::TurnLeft | Action::TurnRight)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Body,
    Head,
    Hand,
    Forearm,
    Leg,
    Calf,
}

impl Part {
    pub const ALL: [Part; 6] = [
        Part::Body,
        Part::Head,
        Part::Hand,
        Part::Forearm,
        Part::Leg,
        Part::Calf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Part::Body => "body",
            Part::Head => "head",
            Part::Hand => "hand",
            Part::Forearm => "forearm",
            Part::Leg => "leg",
            Part::Calf => "calf",
        }
    }

    /// Limbs come in pairs and need a side.
    pub fn is_sided(self) -> bool {
        matches!(self, Part::Hand | Part::Forearm | Part::Leg | Part::Calf)
    }
}

macro_rules! token_impls {
    ($ty:ident, $what:literal) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                $ty::ALL
                    .into_iter()
                    .find(|v| v.as_str() == s)
                    .ok_or_else(|| format!(concat!("unknown ", $what, " `{}`"), s))
            }
        }
    };
}

token_impls!(Action, "action");
token_impls!(Part, "part");

/// One recognized sub-command. Indices count characters (not bytes) of the
/// original text; `end_idx` is exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandItem {
    pub action: Action,
    pub part: Part,
    pub start_idx: usize,
    pub end_idx: usize,
}

impl CommandItem {
    pub fn new(action: Action, part: Part, start_idx: usize, end_idx: usize) -> Self {
        Self {
            action,
            part,
            start_idx,
            end_idx,
        }
    }

    /// The covered substring of `text`.
    pub fn span_text(&self, text: &str) -> String {
        text.chars()
            .skip(self.start_idx)
            .take(self.end_idx - self.start_idx)
            .collect()
    }
}

/// A fully quantized action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSpec {
    pub action: Action,
    pub part: Part,
    pub side: Side,
    /// Rotation in degrees; `-1` asks for the action's default.
    pub degrees: f64,
    pub direction: Option<Direction>,
    pub count: Option<u32>,
    /// Whether any field was drawn from the random generator.
    pub rng_seeded: bool,
    pub span: (usize, usize),
}

/// Run both stages with a generator seeded from `seed`.
pub fn interpret(text: &str, seed: u64) -> (Vec<CommandItem>, Vec<ActionSpec>) {
    let items = extract_commands(text);
    let specs = quantize_all(&items, text, seed);
    (items, specs)
}

/// Quantize an already-extracted list, sharing one seeded generator.
pub fn quantize_all(items: &[CommandItem], text: &str, seed: u64) -> Vec<ActionSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    items
        .iter()
        .map(|item| quantize_action(item, text, &mut rng))
        .collect()
}
