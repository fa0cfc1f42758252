use std::sync::LazyLock;

use regex::Regex;

use super::{Action, CommandItem, Part};

const LEAD: &str = r"(?:^|\s+)";
const POSS: &str = r"(?:(?:his|her|its|their|the|a|an)\s+)?";
const SIDE: &str = r"(?:(?:left|right)\s+)?";
const TOWARD: &str = r"(?:to\s+(?:the\s+)?)?";

fn raise() -> &'static str {
    r"rais(?:e|es|ed|ing)"
}

fn put_down() -> &'static str {
    r"(?:put|puts|putting)\s+down"
}

/// Supported patterns in evaluation order: body, head, arm parts, leg parts.
static PATTERNS: LazyLock<Vec<(Action, Part, Regex)>> = LazyLock::new(|| {
    let hand = r"(?:hand|arm)s?";
    let forearm = r"forearms?";
    let leg = r"legs?";
    let calf = r"(?:calf|calves)";
    let limb = |verb: &str, noun: &str| format!(r"{LEAD}{verb}\s+{POSS}{SIDE}{noun}\b");
    let table: Vec<(Action, Part, String)> = vec![
        (Action::Move, Part::Body, format!(r"{LEAD}mov(?:e|es|ed|ing)\b")),
        (Action::Walk, Part::Body, format!(r"{LEAD}walk(?:s|ed|ing)?\b")),
        (Action::Run, Part::Body, format!(r"{LEAD}(?:run|runs|running|ran)\b")),
        (
            Action::TurnLeft,
            Part::Body,
            format!(r"{LEAD}turn(?:s|ed|ing)?\s+{TOWARD}left\b"),
        ),
        (
            Action::TurnRight,
            Part::Body,
            format!(r"{LEAD}turn(?:s|ed|ing)?\s+{TOWARD}right\b"),
        ),
        (Action::Raise, Part::Head, format!(r"{LEAD}{}\s+{POSS}head\b", raise())),
        (Action::Bow, Part::Head, format!(r"{LEAD}bow(?:s|ed|ing)?(?:\s+{POSS}head)?\b")),
        (
            Action::Shake,
            Part::Head,
            format!(r"{LEAD}(?:shak(?:e|es|ed|ing)|shook)\s+{POSS}head\b"),
        ),
        (
            Action::LookLeft,
            Part::Head,
            format!(r"{LEAD}look(?:s|ed|ing)?\s+{TOWARD}left\b"),
        ),
        (
            Action::LookRight,
            Part::Head,
            format!(r"{LEAD}look(?:s|ed|ing)?\s+{TOWARD}right\b"),
        ),
        (Action::Raise, Part::Hand, limb(raise(), hand)),
        (Action::PutDown, Part::Hand, limb(put_down(), hand)),
        (Action::Wave, Part::Hand, limb(r"wav(?:e|es|ed|ing)", hand)),
        (Action::Raise, Part::Forearm, limb(raise(), forearm)),
        (Action::PutDown, Part::Forearm, limb(put_down(), forearm)),
        (Action::Wave, Part::Forearm, limb(r"wav(?:e|es|ed|ing)", forearm)),
        (Action::Lift, Part::Leg, limb(r"lift(?:s|ed|ing)?", leg)),
        (Action::PutDown, Part::Leg, limb(put_down(), leg)),
        (Action::Lift, Part::Calf, limb(r"lift(?:s|ed|ing)?", calf)),
        (Action::PutDown, Part::Calf, limb(put_down(), calf)),
    ];
    table
        .into_iter()
        .map(|(a, p, src)| {
            let re = Regex::new(&format!("(?i){src}")).expect("static pattern compiles");
            (a, p, re)
        })
        .collect()
});

/// Items in discovery order. Each pass tries every pattern once; a match is
/// recorded and its span overwritten with dashes so later passes cannot see
/// it again. Passes repeat until one adds nothing.
pub fn extract_commands_unsorted(command: &str) -> Vec<CommandItem> {
    let mut working = command.to_string();
    let mut items = Vec::new();
    loop {
        let pre_len = items.len();
        for (action, part, re) in PATTERNS.iter() {
            let Some(m) = re.find(&working) else {
                continue;
            };
            let start = working[..m.start()].chars().count();
            let len = m.as_str().chars().count();
            items.push(CommandItem::new(*action, *part, start, start + len));
            working = format!(
                "{}{}{}",
                &working[..m.start()],
                "-".repeat(len),
                &working[m.end()..]
            );
        }
        if items.len() == pre_len {
            return items;
        }
    }
}

/// Items sorted by start index.
pub fn extract_commands(command: &str) -> Vec<CommandItem> {
    let mut items = extract_commands_unsorted(command);
    items.sort_by_key(|i| i.start_idx);
    items
}
