//! Span-aware walking of a parsed TOML document.

use std::ops::Range;

use toml::de::{DeTable, DeValue};
use toml::Spanned;

use super::{Diagnostic, ParseMode, SourceLocation, SpecError};

pub(crate) struct Source<'s> {
    text: &'s str,
    line_starts: Vec<usize>,
}

impl<'s> Source<'s> {
    /// Decodes strict UTF-8; an invalid byte is reported at its position.
    pub(crate) fn decode(bytes: &'s [u8]) -> Result<Self, SpecError> {
        match std::str::from_utf8(bytes) {
            Ok(text) => Ok(Self::new(text)),
            Err(e) => {
                let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or_default();
                let src = Self::new(valid);
                Err(SpecError::Syntax {
                    location: src.location(e.valid_up_to(), ""),
                    message: "input is not valid UTF-8".into(),
                })
            }
        }
    }

    pub(crate) fn new(text: &'s str) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        Self { text, line_starts }
    }

    pub(crate) fn location(&self, offset: usize, path: &str) -> SourceLocation {
        let offset = offset.min(self.text.len());
        let line = self.line_starts.partition_point(|&s| s <= offset);
        let start = self.line_starts[line - 1];
        let column = self
            .text
            .get(start..offset)
            .map(|s| s.chars().count())
            .unwrap_or(0)
            + 1;
        SourceLocation {
            line: Some(line),
            column: Some(column),
            path: path.to_string(),
        }
    }

    pub(crate) fn parse(&self) -> Result<Spanned<DeTable<'s>>, SpecError> {
        DeTable::parse(self.text).map_err(|e| SpecError::Syntax {
            location: self.location(e.span().map(|s| s.start).unwrap_or(0), ""),
            message: e.message().trim().to_string(),
        })
    }

    pub(crate) fn schema(&self, span: &Range<usize>, path: &str, message: impl Into<String>) -> SpecError {
        SpecError::Schema {
            location: self.location(span.start, path),
            message: message.into(),
        }
    }
}

/// Per-parse state: source text, unknown-key policy and collected warnings.
pub(crate) struct Ctx<'s> {
    pub(crate) src: Source<'s>,
    pub(crate) mode: ParseMode,
    pub(crate) warnings: Vec<Diagnostic>,
}

impl<'s> Ctx<'s> {
    pub(crate) fn new(bytes: &'s [u8], mode: ParseMode) -> Result<Self, SpecError> {
        Ok(Self {
            src: Source::decode(bytes)?,
            mode,
            warnings: Vec::new(),
        })
    }

    pub(crate) fn validation(
        &self,
        span: &Range<usize>,
        path: &str,
        layer: Option<usize>,
        field: &str,
        message: impl Into<String>,
    ) -> SpecError {
        SpecError::Validation {
            location: self.src.location(span.start, path),
            layer,
            field: field.to_string(),
            message: message.into(),
        }
    }
}

fn join(parent: &str, key: &str) -> String {
    if parent.is_empty() {
        key.to_string()
    } else {
        format!("{parent}.{key}")
    }
}

/// A view of one TOML table that records which keys were consumed.
pub(crate) struct TableReader<'t, 'i> {
    table: &'t DeTable<'i>,
    span: Range<usize>,
    pub(crate) path: String,
    /// Layer index reported by validation errors raised from this table.
    pub(crate) layer: Option<usize>,
    seen: Vec<&'static str>,
    seen_all: bool,
}

impl<'t, 'i> TableReader<'t, 'i> {
    pub(crate) fn new(table: &'t Spanned<DeTable<'i>>, path: impl Into<String>) -> Self {
        Self {
            table: table.get_ref(),
            span: table.span(),
            path: path.into(),
            layer: None,
            seen: Vec::new(),
            seen_all: false,
        }
    }

    fn from_value(
        ctx: &Ctx<'_>,
        value: &'t Spanned<DeValue<'i>>,
        path: String,
    ) -> Result<Self, SpecError> {
        match value.get_ref() {
            DeValue::Table(table) => Ok(Self {
                table,
                span: value.span(),
                path,
                layer: None,
                seen: Vec::new(),
                seen_all: false,
            }),
            other => Err(ctx.src.schema(
                &value.span(),
                &path,
                format!("expected a table, found {}", other.type_str()),
            )),
        }
    }

    pub(crate) fn key_path(&self, key: &str) -> String {
        join(&self.path, key)
    }

    fn get(&mut self, key: &'static str) -> Option<&'t Spanned<DeValue<'i>>> {
        self.seen.push(key);
        self.table.get(key)
    }

    /// Span of a key's value, or of the whole table when absent.
    pub(crate) fn value_span(&self, key: &str) -> Range<usize> {
        self.table
            .get(key)
            .map(|v| v.span())
            .unwrap_or_else(|| self.span.clone())
    }

    fn missing(&self, ctx: &Ctx<'_>, key: &str) -> SpecError {
        ctx.src.schema(
            &self.span,
            &self.key_path(key),
            format!("missing required field `{key}`"),
        )
    }

    fn type_error(&self, ctx: &Ctx<'_>, key: &str, v: &Spanned<DeValue<'_>>, want: &str) -> SpecError {
        ctx.src.schema(
            &v.span(),
            &self.key_path(key),
            format!("`{key}` must be {want}, found {}", v.get_ref().type_str()),
        )
    }

    pub(crate) fn opt_u64(&mut self, ctx: &Ctx<'_>, key: &'static str) -> Result<Option<u64>, SpecError> {
        let Some(v) = self.get(key) else {
            return Ok(None);
        };
        let DeValue::Integer(i) = v.get_ref() else {
            return Err(self.type_error(ctx, key, v, "an integer"));
        };
        let parsed = i64::from_str_radix(i.as_str(), i.radix()).map_err(|_| {
            ctx.validation(&v.span(), &self.key_path(key), self.layer, key, format!("`{key}` is out of range"))
        })?;
        u64::try_from(parsed).map(Some).map_err(|_| {
            ctx.validation(
                &v.span(),
                &self.key_path(key),
                self.layer,
                key,
                format!("`{key}` must not be negative (got {parsed})"),
            )
        })
    }

    pub(crate) fn req_u64(&mut self, ctx: &Ctx<'_>, key: &'static str) -> Result<u64, SpecError> {
        self.opt_u64(ctx, key)?.ok_or_else(|| self.missing(ctx, key))
    }

    /// Accepts TOML integers and floats.
    pub(crate) fn opt_f64(&mut self, ctx: &Ctx<'_>, key: &'static str) -> Result<Option<f64>, SpecError> {
        let Some(v) = self.get(key) else {
            return Ok(None);
        };
        let parsed = match v.get_ref() {
            DeValue::Float(f) => f.as_str().parse::<f64>().ok(),
            DeValue::Integer(i) => i64::from_str_radix(i.as_str(), i.radix()).ok().map(|i| i as f64),
            _ => return Err(self.type_error(ctx, key, v, "a number")),
        };
        parsed.map(Some).ok_or_else(|| {
            ctx.validation(&v.span(), &self.key_path(key), self.layer, key, format!("`{key}` is not a representable number"))
        })
    }

    pub(crate) fn opt_bool(&mut self, ctx: &Ctx<'_>, key: &'static str) -> Result<Option<bool>, SpecError> {
        let Some(v) = self.get(key) else {
            return Ok(None);
        };
        match v.get_ref() {
            DeValue::Boolean(b) => Ok(Some(*b)),
            _ => Err(self.type_error(ctx, key, v, "a boolean")),
        }
    }

    /// Returns the string and its span.
    pub(crate) fn opt_str(
        &mut self,
        ctx: &Ctx<'_>,
        key: &'static str,
    ) -> Result<Option<(String, Range<usize>)>, SpecError> {
        let Some(v) = self.get(key) else {
            return Ok(None);
        };
        match v.get_ref() {
            DeValue::String(s) => Ok(Some((s.to_string(), v.span()))),
            _ => Err(self.type_error(ctx, key, v, "a string")),
        }
    }

    pub(crate) fn req_str(
        &mut self,
        ctx: &Ctx<'_>,
        key: &'static str,
    ) -> Result<(String, Range<usize>), SpecError> {
        self.opt_str(ctx, key)?.ok_or_else(|| self.missing(ctx, key))
    }

    pub(crate) fn opt_table(
        &mut self,
        ctx: &Ctx<'_>,
        key: &'static str,
    ) -> Result<Option<TableReader<'t, 'i>>, SpecError> {
        let path = self.key_path(key);
        match self.get(key) {
            Some(v) => Self::from_value(ctx, v, path).map(Some),
            None => Ok(None),
        }
    }

    pub(crate) fn req_table(&mut self, ctx: &Ctx<'_>, key: &'static str) -> Result<TableReader<'t, 'i>, SpecError> {
        self.opt_table(ctx, key)?.ok_or_else(|| self.missing(ctx, key))
    }

    /// An array whose elements must all be tables.
    pub(crate) fn req_table_array(
        &mut self,
        ctx: &Ctx<'_>,
        key: &'static str,
    ) -> Result<(Vec<TableReader<'t, 'i>>, Range<usize>), SpecError> {
        let path = self.key_path(key);
        let v = self.get(key).ok_or_else(|| self.missing(ctx, key))?;
        let DeValue::Array(items) = v.get_ref() else {
            return Err(self.type_error(ctx, key, v, "an array of tables"));
        };
        let readers = items
            .iter()
            .enumerate()
            .map(|(i, item)| Self::from_value(ctx, item, format!("{path}[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((readers, v.span()))
    }

    /// Iterates all entries without marking them; used for free-form maps.
    pub(crate) fn entries(&self) -> impl Iterator<Item = (&'t Spanned<std::borrow::Cow<'i, str>>, &'t Spanned<DeValue<'i>>)> {
        self.table.iter()
    }

    pub(crate) fn mark_all_seen(&mut self) {
        self.seen_all = true;
    }

    /// Rejects (strict) or records (lenient) keys that were never read.
    pub(crate) fn finish(self, ctx: &mut Ctx<'_>) -> Result<(), SpecError> {
        if self.seen_all {
            return Ok(());
        }
        for (key, _) in self.table.iter() {
            let name: &str = key.get_ref();
            if self.seen.contains(&name) {
                continue;
            }
            let location = ctx.src.location(key.span().start, &self.key_path(name));
            let message = format!("unknown field `{name}`");
            match ctx.mode {
                ParseMode::Strict => return Err(SpecError::Schema { location, message }),
                ParseMode::Lenient => ctx.warnings.push(Diagnostic {
                    location,
                    message: format!("{message} ignored"),
                }),
            }
        }
        Ok(())
    }
}
