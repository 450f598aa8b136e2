use alloc::vec::Vec;

use hashbrown::HashMap;

use super::{sort_by_first_member, Grouper, Members};
use crate::anonymize::RegexRuleSet;
use crate::error::Result;
use crate::model::{tokenize, GroupId, LogGroup, LogRecord, Template, Token};

/// Categorize-then-reconcile grouper.
///
/// Records are binned by (token count, anonymized variable count). Inside a
/// bin a record joins the group whose constant tokens agree with its own at
/// every position.
#[derive(Debug)]
pub struct AelGrouper {
    rules: RegexRuleSet,
    bins: HashMap<(usize, usize), Vec<usize>>,
    groups: Vec<(Vec<Token>, Members)>,
}

impl AelGrouper {
    pub fn new(rules: RegexRuleSet) -> Self {
        AelGrouper {
            rules,
            bins: HashMap::new(),
            groups: Vec::new(),
        }
    }
}

impl Grouper for AelGrouper {
    fn feed(&mut self, record: &LogRecord) -> Result<GroupId> {
        let signature = self.rules.anonymize(&tokenize(&record.content)?);
        let variables = signature.iter().filter(|t| t.is_variable()).count();
        let bin = self.bins.entry((signature.len(), variables)).or_default();
        let found = bin.iter().copied().find(|&g| self.groups[g].0 == signature);
        let idx = match found {
            Some(g) => g,
            None => {
                let g = self.groups.len();
                bin.push(g);
                self.groups
                    .push((signature, Members::new(GroupId(g as u32))));
                g
            }
        };
        let members = &mut self.groups[idx].1;
        members.push(record);
        Ok(members.id)
    }

    fn finalize(self) -> Vec<LogGroup> {
        let mut groups: Vec<LogGroup> = self
            .groups
            .into_iter()
            .map(|(sig, m)| m.into_group(Template::new(sig)))
            .collect();
        sort_by_first_member(&mut groups);
        groups
    }
}
