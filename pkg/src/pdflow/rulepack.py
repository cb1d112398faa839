"""Identification rules: personal-data sources, literal values, and processing sinks.

A rule pack is an ordered collection of source and sink rules. Order matters:
the first matching rule wins, so more specific patterns are listed before the
generic verbs they would otherwise shadow (``userAgent`` must reach the
technical-data rule before the account ``user`` rule sees it).

Identifier matching is case-insensitive and separator-tolerant: camelCase
boundaries and ``-`` are normalized to ``_`` and patterns are anchored at
token boundaries, so a ``log`` verb never matches ``login``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import yaml

from .errors import DuplicateRuleId, InvalidRegex, ParseError


class SourceCategory(Enum):
    """The ten personal-data categories, valued by their abbreviation."""

    ACCOUNT = "ACC"
    CONTACT = "CON"
    PERSONAL_ID = "PID"
    ONLINE_IDENTIFIER = "OID"
    LOCATION = "LOC"
    FEEDBACK = "FEE"
    HEALTH = "HEA"
    NATIONAL_ID = "NID"
    TECHNICAL = "TEC"
    FINANCIAL = "FIN"

    @property
    def abbreviation(self) -> str:
        return self.value

    @classmethod
    def from_abbreviation(cls, abbr: str) -> "SourceCategory":
        try:
            return cls(abbr.upper())
        except ValueError:
            raise ParseError(f"unknown source category abbreviation: {abbr!r}") from None


class SinkCategory(Enum):
    """The six processing categories, valued by their abbreviation."""

    MANIPULATION = "M"
    TRANSPORTATION = "T"
    CREATION_DELETION = "C/D"
    DATABASE = "DB"
    ENCRYPTION = "E"
    LOG = "L"

    @property
    def abbreviation(self) -> str:
        return self.value

    @classmethod
    def from_abbreviation(cls, abbr: str) -> "SinkCategory":
        try:
            return cls(abbr.upper())
        except ValueError:
            raise ParseError(f"unknown sink category abbreviation: {abbr!r}") from None


class RuleKind(Enum):
    VARIABLE_NAME = "variable"
    LITERAL_VALUE = "literal"


class Certainty(Enum):
    SOLID = "solid"
    DASHED = "dashed"


SOURCE_CATEGORY_ORDER = tuple(SourceCategory)
SINK_CATEGORY_ORDER = tuple(SinkCategory)

_CAMEL_BOUNDARY = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")


def normalize_identifier(name: str) -> str:
    """Lower-case an identifier, mapping camelCase boundaries and ``-`` to ``_``."""
    return _CAMEL_BOUNDARY.sub("_", name).replace("-", "_").lower()


def _compile_token_regex(pattern: str, rule_id: str) -> re.Pattern[str]:
    """Compile ``pattern`` so it only matches at token boundaries of a normalized name."""
    try:
        return re.compile(rf"(?<![a-z0-9])(?:{pattern})(?![a-z0-9])", re.IGNORECASE)
    except re.error as exc:
        raise InvalidRegex(f"rule {rule_id!r}: pattern {pattern!r} does not compile: {exc}") from exc


def _compile_raw_regex(pattern: str, rule_id: str) -> re.Pattern[str]:
    try:
        return re.compile(pattern)
    except re.error as exc:
        raise InvalidRegex(f"rule {rule_id!r}: pattern {pattern!r} does not compile: {exc}") from exc


@dataclass
class SourceRule:
    """Matches identifiers (kind=variable) or string-literal values (kind=literal)."""

    id: str
    category: SourceCategory
    stem: str
    patterns: tuple[str, ...]
    kind: RuleKind = RuleKind.VARIABLE_NAME
    _compiled: tuple[re.Pattern[str], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.patterns = tuple(self.patterns)
        if not self.patterns:
            raise ParseError(f"rule {self.id!r}: patterns must be non-empty")
        if self.stem != self.stem.lower() or re.search(r"[^a-z0-9_]", self.stem):
            raise ParseError(f"rule {self.id!r}: stem must be lowercase and separator-free")
        if self.kind is RuleKind.VARIABLE_NAME:
            self._compiled = tuple(_compile_token_regex(p, self.id) for p in self.patterns)
        else:
            self._compiled = tuple(_compile_raw_regex(p, self.id) for p in self.patterns)

    def matches_identifier(self, identifier: str) -> bool:
        if self.kind is not RuleKind.VARIABLE_NAME:
            return False
        normalized = normalize_identifier(identifier)
        return any(rx.search(normalized) for rx in self._compiled)

    def literal_spans(self, text: str) -> list[tuple[int, int]]:
        """Byte spans of every literal match inside ``text``."""
        if self.kind is not RuleKind.LITERAL_VALUE:
            return []
        spans = []
        for rx in self._compiled:
            for m in rx.finditer(text):
                start = len(text[: m.start()].encode("utf-8"))
                end = start + len(m.group(0).encode("utf-8"))
                spans.append((start, end))
        return spans


@dataclass
class SinkRule:
    """Matches the final callee name of a call expression."""

    id: str
    category: SinkCategory
    pattern: str
    certainty: Certainty = Certainty.SOLID
    origin: str = "dpv"  # "dpv" (vocabulary verb) or "api" (provider method)
    provider: str | None = None
    _compiled: re.Pattern[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self._compiled = _compile_token_regex(self.pattern, self.id)

    def matches(self, callee: str) -> bool:
        return bool(self._compiled.search(normalize_identifier(callee)))


@dataclass
class RulePack:
    """Immutable after construction; shared read-only by scanner workers."""

    sources: tuple[SourceRule, ...]
    sinks: tuple[SinkRule, ...]
    version: str = "0"

    def __post_init__(self) -> None:
        self.sources = tuple(self.sources)
        self.sinks = tuple(self.sinks)
        seen: set[str] = set()
        for rule in (*self.sources, *self.sinks):
            if rule.id in seen:
                raise DuplicateRuleId(f"duplicate rule id: {rule.id!r}")
            seen.add(rule.id)
        self._source_cache: dict[str, tuple[SourceRule, str] | None] = {}
        self._sink_cache: dict[str, SinkRule | None] = {}

    # Caches are keyed by the raw token; identifiers repeat heavily in real
    # code, so this turns most matching into a dict hit. Capped to bound memory.
    _CACHE_CAP = 1 << 16

    def match_source(self, identifier: str) -> tuple[SourceRule, str] | None:
        """First variable-name rule matching ``identifier``, with its stem."""
        if not identifier:
            return None
        cached = self._source_cache.get(identifier, _MISS)
        if cached is not _MISS:
            return cached
        result = None
        for rule in self.sources:
            if rule.kind is RuleKind.VARIABLE_NAME and rule.matches_identifier(identifier):
                result = (rule, rule.stem)
                break
        if len(self._source_cache) < self._CACHE_CAP:
            self._source_cache[identifier] = result
        return result

    def match_literal(self, text: str) -> list[tuple[SourceRule, tuple[int, int]]]:
        """All literal-value matches inside ``text`` with byte spans, in span order."""
        if not text:
            return []
        hits: list[tuple[int, int, SourceRule, tuple[int, int]]] = []
        for order, rule in enumerate(self.sources):
            if rule.kind is not RuleKind.LITERAL_VALUE:
                continue
            for span in rule.literal_spans(text):
                hits.append((span[0], order, rule, span))
        hits.sort(key=lambda h: (h[0], h[1]))
        return [(rule, span) for _, _, rule, span in hits]

    def match_sink(self, callee: str) -> SinkRule | None:
        """First sink rule whose pattern matches ``callee`` at a token boundary."""
        if not callee:
            return None
        cached = self._sink_cache.get(callee, _MISS)
        if cached is not _MISS:
            return cached
        result = None
        for rule in self.sinks:
            if rule.matches(callee):
                result = rule
                break
        if len(self._sink_cache) < self._CACHE_CAP:
            self._sink_cache[callee] = result
        return result

    def source_rule(self, rule_id: str) -> SourceRule | None:
        for rule in self.sources:
            if rule.id == rule_id:
                return rule
        return None


_MISS = object()


def _src(rule_id: str, category: SourceCategory, stem: str, *patterns: str) -> SourceRule:
    return SourceRule(id=rule_id, category=category, stem=stem, patterns=tuple(patterns))


def _lit(rule_id: str, category: SourceCategory, stem: str, pattern: str) -> SourceRule:
    return SourceRule(
        id=rule_id, category=category, stem=stem, patterns=(pattern,), kind=RuleKind.LITERAL_VALUE
    )


def _snk(
    rule_id: str,
    category: SinkCategory,
    pattern: str,
    certainty: Certainty = Certainty.SOLID,
    origin: str = "dpv",
    provider: str | None = None,
) -> SinkRule:
    return SinkRule(
        id=rule_id, category=category, pattern=pattern, certainty=certainty, origin=origin, provider=provider
    )


def default_pack() -> RulePack:
    """The embedded default pack: every category populated, overridable by user files."""
    A, C, P, O, L = (
        SourceCategory.ACCOUNT,
        SourceCategory.CONTACT,
        SourceCategory.PERSONAL_ID,
        SourceCategory.ONLINE_IDENTIFIER,
        SourceCategory.LOCATION,
    )
    F, H, N, T, FI = (
        SourceCategory.FEEDBACK,
        SourceCategory.HEALTH,
        SourceCategory.NATIONAL_ID,
        SourceCategory.TECHNICAL,
        SourceCategory.FINANCIAL,
    )
    sources = (
        # Multi-token rules come first so they are not shadowed by shorter stems.
        _src("src-tec-user-agent", T, "user_agent", r"user_?agent"),
        _src("src-acc-username", A, "username", r"user_?name"),
        # The prefixed form excludes surgeon_*; the anchored form accepts the
        # bare identifier "name" and nothing longer.
        _src("src-pid-name", P, "name", r"(?:first|given|full|last|sur(?!geon))[_\-]?name", r"^name$"),
        _src("src-acc-account", A, "account", r"account"),
        _src("src-acc-user", A, "user", r"user"),
        _src("src-acc-password", A, "password", r"password|passwd|pwd"),
        _src("src-acc-profile", A, "profile", r"profile"),
        _src("src-con-email", C, "email", r"e_?mail"),
        _src("src-con-phone", C, "phone", r"phone|mobile|telephone"),
        _src("src-con-address", C, "address", r"address"),
        _src("src-con-contact", C, "contact", r"contact"),
        _src("src-pid-gender", P, "gender", r"gender|sex|(?:fe)?male"),
        _src("src-pid-birth", P, "birth", r"birth(?:_?(?:day|date))?|dob"),
        _src("src-pid-age", P, "age", r"age"),
        _src("src-oid-ip", O, "ip", r"ip(?:_?(?:addr(?:ess)?|v4|v6))?"),
        _src("src-oid-cookie", O, "cookie", r"cookies?"),
        _src("src-oid-session", O, "session", r"session"),
        _src("src-oid-uuid", O, "uuid", r"uu?id|guid"),
        _src("src-oid-mac", O, "mac", r"mac_?addr(?:ess)?"),
        _src("src-loc-location", L, "location", r"location"),
        _src("src-loc-latitude", L, "latitude", r"lat(?:itude)?"),
        _src("src-loc-longitude", L, "longitude", r"longitude|lng|lon"),
        _src("src-loc-geo", L, "geo", r"geo(?:_?location)?"),
        _src("src-loc-city", L, "city", r"city"),
        _src("src-fee-feedback", F, "feedback", r"feedback"),
        _src("src-fee-rating", F, "rating", r"ratings?"),
        _src("src-fee-review", F, "review", r"reviews?"),
        _src("src-fee-comment", F, "comment", r"comments?"),
        _src("src-hea-health", H, "health", r"health"),
        _src("src-hea-weight", H, "weight", r"weight"),
        _src("src-hea-heart", H, "heart", r"heart(?:_?rate)?"),
        _src("src-hea-blood", H, "blood", r"blood(?:_?(?:type|pressure))?"),
        _src("src-hea-steps", H, "steps", r"steps"),
        _src("src-nid-ssn", N, "ssn", r"ssn|social_?security(?:_?number)?"),
        _src("src-nid-passport", N, "passport", r"passport"),
        _src("src-nid-national-id", N, "national_id", r"national_?id"),
        _src("src-nid-tax-id", N, "tax_id", r"tax_?id"),
        _src("src-tec-device", T, "device", r"device"),
        _src("src-tec-os", T, "os", r"os|operating_?system"),
        _src("src-tec-browser", T, "browser", r"browser"),
        _src("src-fin-card", FI, "card", r"(?:credit_?)?card"),
        _src("src-fin-iban", FI, "iban", r"iban"),
        _src("src-fin-payment", FI, "payment", r"payment"),
        _src("src-fin-salary", FI, "salary", r"salary"),
        _src("src-fin-invoice", FI, "invoice", r"invoice"),
        # Literal (clear-text value) rules; matched flows carry Low confidence.
        _lit("lit-con-email", C, "email", r"[A-Za-z0-9._%+\-]+@[A-Za-z0-9.\-]+\.[A-Za-z]{2,}"),
        _lit("lit-oid-ip", O, "ip", r"\b(?:(?:25[0-5]|2[0-4]\d|1?\d?\d)\.){3}(?:25[0-5]|2[0-4]\d|1?\d?\d)\b"),
        _lit("lit-fin-iban", FI, "iban", r"\b[A-Z]{2}\d{2}[A-Z0-9]{11,30}\b"),
        _lit("lit-nid-ssn", N, "ssn", r"\b\d{3}-\d{2}-\d{4}\b"),
    )

    M, TR, CD, DB, E, LG = (
        SinkCategory.MANIPULATION,
        SinkCategory.TRANSPORTATION,
        SinkCategory.CREATION_DELETION,
        SinkCategory.DATABASE,
        SinkCategory.ENCRYPTION,
        SinkCategory.LOG,
    )
    dashed = Certainty.DASHED
    sinks = (
        # Provider API methods first: several contain generic verbs as tokens.
        _snk("snk-db-create-query-builder", DB, r"create_?query_?builder", origin="api", provider="TypeORM"),
        _snk("snk-cd-find-or-create", CD, r"find_?or_?create\w*", origin="api", provider="Sequelize"),
        _snk("snk-db-find-one", DB, r"find_?one", origin="api", provider="TypeORM"),
        _snk("snk-t-send-data", TR, r"send_?data", origin="api", provider="generic"),
        # Manipulation verbs; predicate/derivation verbs are dashed.
        _snk("snk-m-update", M, r"update"),
        _snk("snk-m-modify", M, r"modify"),
        _snk("snk-m-set", M, r"set"),
        _snk("snk-m-merge", M, r"merge"),
        _snk("snk-m-filter", M, r"filter"),
        _snk("snk-m-format", M, r"format"),
        _snk("snk-m-transform", M, r"transform"),
        _snk("snk-m-retrieve", M, r"retrieve"),
        _snk("snk-m-get", M, r"get"),
        _snk("snk-m-check", M, r"check", dashed),
        _snk("snk-m-match", M, r"match", dashed),
        _snk("snk-m-validate", M, r"validate", dashed),
        _snk("snk-m-compare", M, r"compare", dashed),
        # Transportation.
        _snk("snk-t-send", TR, r"send"),
        _snk("snk-t-transmit", TR, r"transmit"),
        _snk("snk-t-post", TR, r"post"),
        _snk("snk-t-upload", TR, r"upload"),
        _snk("snk-t-share", TR, r"share"),
        _snk("snk-t-transfer", TR, r"transfer"),
        _snk("snk-t-disclose", TR, r"disclose"),
        # Creation/deletion.
        _snk("snk-cd-create", CD, r"create"),
        _snk("snk-cd-insert", CD, r"insert"),
        _snk("snk-cd-delete", CD, r"delete"),
        _snk("snk-cd-remove", CD, r"remove"),
        _snk("snk-cd-erase", CD, r"erase"),
        _snk("snk-cd-destroy", CD, r"destroy"),
        # Database.
        _snk("snk-db-query", DB, r"query", origin="api", provider="generic"),
        _snk("snk-db-find", DB, r"find", origin="api", provider="TypeORM"),
        _snk("snk-db-save", DB, r"save", origin="api", provider="TypeORM"),
        _snk("snk-db-persist", DB, r"persist", origin="api", provider="JPA"),
        _snk("snk-db-execute", DB, r"execute", origin="api", provider="generic"),
        # Encryption / anonymization.
        _snk("snk-e-encrypt", E, r"encrypt"),
        _snk("snk-e-hash", E, r"hash"),
        _snk("snk-e-digest", E, r"digest"),
        _snk("snk-e-anonymize", E, r"anonymi[sz]e"),
        _snk("snk-e-pseudonymize", E, r"pseudonymi[sz]e"),
        # Log.
        _snk("snk-l-log", LG, r"log"),
        _snk("snk-l-print", LG, r"print"),
        _snk("snk-l-warn", LG, r"warn"),
        _snk("snk-l-debug", LG, r"debug"),
        _snk("snk-l-trace", LG, r"trace"),
        _snk("snk-l-console", LG, r"console"),
    )
    return RulePack(sources=sources, sinks=sinks, version="1.0")


def _parse_source_entry(entry: dict) -> SourceRule:
    try:
        kind = RuleKind(entry.get("kind", "variable"))
    except ValueError:
        raise ParseError(f"source rule {entry.get('id')!r}: bad kind {entry.get('kind')!r}") from None
    try:
        return SourceRule(
            id=str(entry["id"]),
            category=SourceCategory.from_abbreviation(str(entry["category"])),
            stem=str(entry["stem"]),
            patterns=tuple(str(p) for p in entry["patterns"]),
            kind=kind,
        )
    except KeyError as exc:
        raise ParseError(f"source rule missing field {exc.args[0]!r}: {entry!r}") from None


def _parse_sink_entry(entry: dict) -> SinkRule:
    try:
        certainty = Certainty(entry.get("certainty", "solid"))
    except ValueError:
        raise ParseError(f"sink rule {entry.get('id')!r}: bad certainty {entry.get('certainty')!r}") from None
    origin = str(entry.get("origin", "dpv"))
    if origin not in ("dpv", "api"):
        raise ParseError(f"sink rule {entry.get('id')!r}: bad origin {origin!r}")
    try:
        return SinkRule(
            id=str(entry["id"]),
            category=SinkCategory.from_abbreviation(str(entry["category"])),
            pattern=str(entry["pattern"]),
            certainty=certainty,
            origin=origin,
            provider=entry.get("provider"),
        )
    except KeyError as exc:
        raise ParseError(f"sink rule missing field {exc.args[0]!r}: {entry!r}") from None


def merge_packs(base: RulePack, overlay: RulePack) -> RulePack:
    """Overlay rules replace same-id base rules in place; new ids append."""

    def merged(base_rules, overlay_rules):
        overlay_by_id = {r.id: r for r in overlay_rules}
        out = [overlay_by_id.pop(r.id, r) for r in base_rules]
        out.extend(r for r in overlay_rules if r.id in overlay_by_id)
        return tuple(out)

    return RulePack(
        sources=merged(base.sources, overlay.sources),
        sinks=merged(base.sinks, overlay.sinks),
        version=overlay.version or base.version,
    )


def load_rulepack(path: str | Path = "default") -> RulePack:
    """Load a pack from a YAML file, merging over the default unless ``replace: true``."""
    if path == "default":
        return default_pack()
    raw = Path(path).read_text(encoding="utf-8")
    try:
        data = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ParseError(f"{path}: not valid YAML: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be a mapping")
    sources = [_parse_source_entry(e) for e in data.get("sources") or []]
    sinks = [_parse_sink_entry(e) for e in data.get("sinks") or []]
    user_pack = RulePack(
        sources=tuple(sources), sinks=tuple(sinks), version=str(data.get("version", ""))
    )
    if data.get("replace"):
        return user_pack
    return merge_packs(default_pack(), user_pack)
