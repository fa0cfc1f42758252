use std::path::Path;

use super::{CmdError, CommandItem};

/// `action,part,start,end` per line, LF endings, trailing newline.
pub fn render_command_file(items: &[CommandItem]) -> String {
    items
        .iter()
        .map(|i| format!("{},{},{},{}\n", i.action, i.part, i.start_idx, i.end_idx))
        .collect()
}

pub fn parse_command_file(text: &str) -> Result<Vec<CommandItem>, CmdError> {
    let mut items = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let err = |message: String| CmdError::Parse {
            line: line_no,
            message,
        };
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(err(format!("expected 4 fields, found {}", fields.len())));
        }
        let action = fields[0].parse().map_err(err)?;
        let part = fields[1].parse().map_err(err)?;
        let index = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| err(format!("`{s}` is not a character index")))
        };
        let (start, end) = (index(fields[2])?, index(fields[3])?);
        if start >= end {
            return Err(err(format!("empty span {start}..{end}")));
        }
        items.push(CommandItem::new(action, part, start, end));
    }
    Ok(items)
}

pub fn write_command_file(items: &[CommandItem], path: impl AsRef<Path>) -> Result<(), CmdError> {
    let path = path.as_ref();
    std::fs::write(path, render_command_file(items)).map_err(|e| CmdError::Write {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn read_command_file(path: impl AsRef<Path>) -> Result<Vec<CommandItem>, CmdError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| CmdError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_command_file(&text)
}
