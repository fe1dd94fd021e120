"""
Command line surface. One subcommand per library operation; graphs come
from files, words from arguments. Every command also speaks --json.

Exit codes: 0 success, 1 domain error, 2 usage or parse error.
"""
import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from fimgraph import config
from fimgraph.cover import (
    classify_pair,
    complete_to_cover,
    quotient_by_deck,
)
from fimgraph.deck import brute_force_deck, deck_group, omega_coset_group
from fimgraph.errors import (
    ConfigError,
    DomainError,
    FimGraphError,
    GraphError,
    GraphParseError,
    InternalConsistencyError,
    WordError,
)
from fimgraph.graph_core import (
    based_isomorphic,
    bouquet,
    classify_local,
    fg_rank,
    id_key,
    induced_morphism,
    is_deterministic,
    is_tree,
    parse_graph,
    serialize_graph,
)
from fimgraph.munn import Word, fim_equal, fim_product, munn_element, munn_tree_graph
from fimgraph.submonoid import (
    CosetGraph,
    coset_equal,
    coset_name,
    conjugate_test,
    contains,
    from_generators,
    induced_immersion,
    normalizer_contains,
    omega_coset,
)

logger = logging.getLogger(__name__)


class UsageError(FimGraphError):
    """Bad command line: missing basepoint, unreadable file and the like."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class CommandResult:
    exit_code: int
    stdout: str = ''
    stderr: str = ''


@dataclass
class Outcome:
    text: str
    result: dict
    witnesses: dict = field(default_factory=dict)


def _bool(value):
    return 'true' if value else 'false'


def _load(path):
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}")
    try:
        return parse_graph(text)
    except GraphParseError as e:
        raise GraphParseError(e.line_number, f"{path}: {e.message}")


def _base(parsed, requested, what='--base'):
    base = requested or parsed.base
    if base is None:
        if len(parsed.graph.vertices) == 1:
            return parsed.graph.vertices[0]
        raise UsageError(f"no basepoint: pass {what} or add a base line to the file")
    if not parsed.graph.has_vertex(base):
        raise UsageError(f"unknown basepoint {base}")
    return base


def _coset_graph(args):
    parsed = _load(args.graph)
    return CosetGraph.from_graph(parsed.graph, _base(parsed, args.base))


def _pair(args):
    """Immersion of the total graph into --target, or into the bouquet over its letters."""
    h = _coset_graph(args)
    if args.target:
        target = _load(args.target)
        down = _base(target, args.target_base, '--target-base')
        return induced_immersion(h, target.graph, down)
    vertex = config.get_bouquet_vertex()
    return induced_immersion(h, bouquet(h.graph.alphabet(), vertex), vertex)


def cmd_check(args):
    parsed = _load(args.graph)
    graph = parsed.graph
    result = {
        'vertices': len(graph.vertices),
        'edges': len(graph.edges),
        'deterministic': is_deterministic(graph),
        'connected': graph.is_connected(),
        'alphabet': sorted(graph.alphabet()),
    }
    if result['connected']:
        result['tree'] = is_tree(graph)
        result['rank'] = fg_rank(graph)
    if parsed.base is not None:
        result['base'] = parsed.base
    lines = [f"{key}: {_bool(value) if isinstance(value, bool) else value}"
             for key, value in result.items() if key != 'alphabet']
    lines.insert(2, f"alphabet: {' '.join(result['alphabet'])}")
    return Outcome("\n".join(lines), result)


def cmd_morphism(args):
    source, target = _load(args.source), _load(args.target)
    v = _base(source, args.base)
    w = _base(target, args.target_base, '--target-base')
    morphism = induced_morphism(source.graph, v, target.graph, w)
    if morphism is None:
        return Outcome("morphism: absent", {'exists': False})
    local = classify_local(morphism)
    pairs = [(x, morphism(x)) for x in sorted(source.graph.vertices, key=id_key)]
    text = "\n".join([f"class: {local.value}"] + [f"{x} -> {y}" for x, y in pairs])
    return Outcome(text, {'exists': True, 'class': local.value}, {'vertex_map': dict(pairs)})


def cmd_fim_eq(args):
    equal = fim_equal(Word.parse(args.u), Word.parse(args.v))
    witnesses = {
        'u': munn_element(args.u).describe().splitlines(),
        'v': munn_element(args.v).describe().splitlines(),
    }
    return Outcome('equal' if equal else 'not equal', {'equal': equal}, witnesses)


def _element_dict(element):
    return {
        'vertices': [str(t) for t in element.tree],
        'root': str(element.root),
        'word': str(element.to_word()),
    }


def cmd_fim_mul(args):
    element = fim_product(Word.parse(w) for w in args.words)
    text = f"{element.describe()}\nword: {element.to_word()}"
    return Outcome(text, _element_dict(element))


def cmd_fim_tree(args):
    element = munn_element(Word.parse(args.word))
    if args.graph:
        graph, base = munn_tree_graph(element)
        text = serialize_graph(graph, base).rstrip("\n")
    else:
        text = element.describe()
    return Outcome(text, _element_dict(element))


def cmd_coset_graph(args):
    h = from_generators(Word.parse(w) for w in args.generators)
    text = serialize_graph(h.graph, h.base).rstrip("\n")
    result = {
        'vertices': list(h.graph.vertices),
        'edges': [[e.id, e.letter, e.src, e.dst] for e in h.graph.edges],
        'base': h.base,
    }
    return Outcome(text, result, {'generators': [str(g) for g in h.generators]})


def cmd_member(args):
    h = _coset_graph(args)
    member = contains(h, Word.parse(args.word))
    return Outcome(_bool(member), {'member': member})


def cmd_coset(args):
    h = _coset_graph(args)
    if args.other is not None:
        equal = coset_equal(h, Word.parse(args.word), Word.parse(args.other))
        return Outcome('equal' if equal else 'not equal', {'equal': equal})
    vertex = omega_coset(h, Word.parse(args.word))
    if vertex is None:
        return Outcome('undefined', {'vertex': None})
    return Outcome(vertex, {'vertex': vertex, 'name': coset_name(h, vertex)})


def cmd_normalizer(args):
    h = _coset_graph(args)
    word = Word.parse(args.word)
    inside = normalizer_contains(h, word)
    return Outcome(_bool(inside), {'normalizer': inside}, {'coset': omega_coset(h, word)})


def cmd_conjugate(args):
    first, second = _load(args.first), _load(args.second)
    h1 = CosetGraph.from_graph(first.graph, _base(first, args.base))
    h2 = CosetGraph.from_graph(second.graph, _base(second, args.other_base, '--other-base'))
    conjugate = conjugate_test(h1, h2)
    based = based_isomorphic(h1.graph, h1.base, h2.graph, h2.base)
    return Outcome(f"{_bool(conjugate)}\nbased: {_bool(based)}",
                   {'conjugate': conjugate, 'based_isomorphic': based})


def cmd_deck(args):
    pair = _pair(args)
    if args.brute_force:
        group = brute_force_deck(pair, config.get_deck_workers())
    else:
        group = deck_group(pair)
    witnesses = {e: dict(sorted(group.witness_maps[e].items(), key=lambda kv: id_key(kv[0])))
                 for e in group.elements}
    return Outcome(group.describe(), group.as_dict(), {'maps': witnesses})


def cmd_coset_group(args):
    h = _coset_graph(args)
    group = omega_coset_group(h)
    return Outcome(group.describe(), group.as_dict(),
                   {'representatives': {group.name(e): str(h.representatives[e]) for e in group.elements}})


def cmd_cover_class(args):
    pair = _pair(args)
    report = classify_pair(pair)
    result = {
        'class': report.local_class.value,
        'full': report.full,
        'normal': report.normal,
        'universal': report.universal,
    }
    witnesses = {}
    if report.missing is not None:
        witnesses['missing'] = {
            'vertex': report.missing.vertex,
            'label': str(report.missing.label),
            'idempotent': str(report.missing.idempotent),
        }
    return Outcome(report.describe(), result, witnesses)


def cmd_complete(args):
    pair = _pair(args)
    depth = args.depth if args.depth is not None else config.get_complete_depth()
    cc = complete_to_cover(pair, depth)
    text = serialize_graph(cc.completed_graph, pair.base_up, cc.frontier).rstrip("\n")
    result = {
        'depth': cc.depth,
        'vertices': len(cc.completed_graph.vertices),
        'edges': len(cc.completed_graph.edges),
        'frontier': sorted(cc.frontier, key=id_key),
    }
    return Outcome(text, result, {'graph': text.splitlines()})


def cmd_quotient(args):
    pair = _pair(args)
    quotient = quotient_by_deck(pair)
    base = quotient.projection(pair.base_up)
    text = (serialize_graph(quotient.graph, base) + quotient.orbit_table()).rstrip("\n")
    result = {
        'vertices': list(quotient.graph.vertices),
        'edges': [[e.id, e.letter, e.src, e.dst] for e in quotient.graph.edges],
        'base': base,
        'group_order': quotient.group.order,
    }
    witnesses = {
        'vertex_orbits': {k: list(v) for k, v in quotient.vertex_orbits.items()},
        'edge_orbits': {k: list(v) for k, v in quotient.edge_orbits.items()},
    }
    return Outcome(text, result, witnesses)


def _add_graph_args(parser, target=True):
    parser.add_argument('graph', help="graph file")
    parser.add_argument('--base', help="basepoint (default: the file's base line)")
    if target:
        parser.add_argument('--target', help="base graph file (default: bouquet over the graph's letters)")
        parser.add_argument('--target-base', help="basepoint in the target")


def build_parser():
    parser = _Parser(
        prog='immerse',
        description="Graph immersions, free inverse monoids and deck transformations")
    parser.add_argument('--json', action='store_true', help="emit a JSON document")
    parser.add_argument('--verbose', action='store_true', help="log progress to stderr")
    commands = parser.add_subparsers(dest='command', required=True, metavar='command')

    p = commands.add_parser('check', help="structural summary of a graph file")
    p.add_argument('graph')
    p.set_defaults(handler=cmd_check)

    p = commands.add_parser('morphism', help="induced morphism between two pointed graphs")
    p.add_argument('source')
    p.add_argument('target')
    p.add_argument('--base')
    p.add_argument('--target-base')
    p.set_defaults(handler=cmd_morphism)

    p = commands.add_parser('fim-eq', help="word problem in FIM(X)")
    p.add_argument('u')
    p.add_argument('v')
    p.set_defaults(handler=cmd_fim_eq)

    p = commands.add_parser('fim-mul', help="product of words in FIM(X)")
    p.add_argument('words', nargs='+')
    p.set_defaults(handler=cmd_fim_mul)

    p = commands.add_parser('fim-tree', help="Munn tree of a word")
    p.add_argument('word')
    p.add_argument('--graph', action='store_true', help="print the tree as a graph file")
    p.set_defaults(handler=cmd_fim_tree)

    p = commands.add_parser('coset-graph', help="coset graph of a finitely generated closed inverse submonoid")
    p.add_argument('generators', nargs='*')
    p.set_defaults(handler=cmd_coset_graph)

    p = commands.add_parser('member', help="membership in H")
    _add_graph_args(p, target=False)
    p.add_argument('word')
    p.set_defaults(handler=cmd_member)

    p = commands.add_parser('coset', help="right omega-coset of a word, or equality of two")
    _add_graph_args(p, target=False)
    p.add_argument('word')
    p.add_argument('other', nargs='?')
    p.set_defaults(handler=cmd_coset)

    p = commands.add_parser('normalizer', help="membership in N(H)")
    _add_graph_args(p, target=False)
    p.add_argument('word')
    p.set_defaults(handler=cmd_normalizer)

    p = commands.add_parser('conjugate', help="are two coset graphs conjugate")
    p.add_argument('first')
    p.add_argument('second')
    p.add_argument('--base')
    p.add_argument('--other-base')
    p.set_defaults(handler=cmd_conjugate)

    p = commands.add_parser('deck', help="deck transformation group")
    _add_graph_args(p)
    p.add_argument('--brute-force', action='store_true', help="use the exhaustive search")
    p.set_defaults(handler=cmd_deck)

    p = commands.add_parser('coset-group', help="N(H)/H on omega-cosets")
    _add_graph_args(p, target=False)
    p.set_defaults(handler=cmd_coset_group)

    p = commands.add_parser('cover-class', help="immersion / cover / normal / universal")
    _add_graph_args(p)
    p.set_defaults(handler=cmd_cover_class)

    p = commands.add_parser('complete', help="extend an immersion to a depth-truncated cover")
    _add_graph_args(p)
    p.add_argument('--depth', type=int)
    p.set_defaults(handler=cmd_complete)

    p = commands.add_parser('quotient', help="quotient by the deck group")
    _add_graph_args(p)
    p.set_defaults(handler=cmd_quotient)
    return parser


def _render(args, outcome):
    if args.json:
        document = {'command': args.command, 'result': outcome.result, 'witnesses': outcome.witnesses}
        return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    return outcome.text + "\n"


def run(argv):
    """Run one command and capture its output; never raises for bad input."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        return CommandResult(2, '', f"{parser.format_usage()}error: {e}\n")
    except SystemExit as e:
        return CommandResult(2 if e.code else 0, '', '')
    try:
        outcome = args.handler(args)
    except (GraphParseError, WordError, UsageError) as e:
        return CommandResult(2, '', f"error: {e}\n")
    except InternalConsistencyError as e:
        logger.error(f"Internal consistency failure in {args.command}: {e}")
        return CommandResult(1, '', f"internal error: {e}\n")
    except (DomainError, GraphError, ConfigError) as e:
        return CommandResult(1, '', f"error: {e}\n")
    return CommandResult(0, _render(args, outcome), '')


def main(argv=None):
    """Entry point for the immerse script."""
    argv = sys.argv[1:] if argv is None else argv
    try:
        level = logging.INFO if '--verbose' in argv else config.get_log_level()
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s')
    try:
        result = run(argv)
    except KeyboardInterrupt:
        logger.info("Interrupted")
        return 130
    sys.stdout.write(result.stdout)
    sys.stderr.write(result.stderr)
    return result.exit_code
