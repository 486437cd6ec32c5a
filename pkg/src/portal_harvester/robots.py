"""Minimal robots ruleset: user-agent groups with Allow/Disallow prefixes.

Deliberately small: no wildcards, no crawl-delay (pacing belongs to the
fetch policy).  Precedence is the longest matching prefix within the
most specific matching user-agent group; ties go to Allow; an empty
Disallow pattern allows everything.  Unparseable input degrades to an
empty (allow-all) ruleset, never an error.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class RobotsRule:
    allow: bool
    pattern: str


@dataclass(frozen=True)
class RobotsGroup:
    agents: tuple[str, ...]
    rules: tuple[RobotsRule, ...]


@dataclass(frozen=True)
class RobotsRuleset:
    groups: tuple[RobotsGroup, ...] = ()


EMPTY_RULESET = RobotsRuleset()


def parse_robots(text: str) -> RobotsRuleset:
    groups: list[RobotsGroup] = []
    agents: list[str] = []
    rules: list[RobotsRule] = []
    in_group_body = False

    def flush():
        nonlocal agents, rules, in_group_body
        if agents:
            groups.append(RobotsGroup(tuple(agents), tuple(rules)))
        agents, rules, in_group_body = [], [], False

    for raw_line in text.splitlines():
        line = raw_line.split("#", 1)[0].strip()
        if not line or ":" not in line:
            continue
        key, _, value = line.partition(":")
        key = key.strip().lower()
        value = value.strip()
        if key == "user-agent":
            if in_group_body:
                flush()
            agents.append(value.lower())
        elif key in ("allow", "disallow") and agents:
            rules.append(RobotsRule(allow=(key == "allow"), pattern=value))
            in_group_body = True
        # unknown directives ignored
    flush()
    return RobotsRuleset(tuple(groups))


def robots_allows(ruleset: RobotsRuleset, user_agent: str, path: str) -> bool:
    rules = _rules_for_agent(ruleset, user_agent)
    best: RobotsRule | None = None
    for rule in rules:
        if not rule.pattern:
            continue  # empty pattern: Disallow-nothing / Allow-nothing
        if path.startswith(rule.pattern):
            if best is None or len(rule.pattern) > len(best.pattern) or (
                    len(rule.pattern) == len(best.pattern) and rule.allow):
                best = rule
    return True if best is None else best.allow


def _rules_for_agent(ruleset: RobotsRuleset, user_agent: str) -> list[RobotsRule]:
    agent = user_agent.lower()
    best_token = ""
    for group in ruleset.groups:
        for token in group.agents:
            if token != "*" and token in agent and len(token) > len(best_token):
                best_token = token
    rules: list[RobotsRule] = []
    if best_token:
        for group in ruleset.groups:
            if best_token in group.agents:
                rules.extend(group.rules)
    else:
        for group in ruleset.groups:
            if "*" in group.agents:
                rules.extend(group.rules)
    return rules
