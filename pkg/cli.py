#!/usr/bin/env python3
"""
λ-IAM 命令行

子命令：
    run     运行机器并打印轨迹
    sem     计算 ⟦t⟧k
    reduce  线性头归约序列（JSON lines）
    check   运行检查套件
    diff    沿 ⊸ 序列比较语义与运行长度
    goi     带 log 位置与 GoI 栈 (B, S) 的对照

退出码：0 成功/一致，1 超时/⊥，2 语法或用法错误，3 违例或套件失败
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from errors import IamError, SuiteError, TermSyntaxError
from goi import check_coherence, goi_rows
from improvement import format_step_table, step_table
from machine import (
    Stuck, Timeout, classify, describe_outcome, format_trace, run, semantics_to_dict, trace_record,
)
from reduction import lhe_normalize
from syntax import Term, parse, path_to_json, pretty

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_TIMEOUT = 1
EXIT_USAGE = 2
EXIT_FAILURE = 3


def exit_code_for(outcome) -> int:
    """退出码只取决于结果的类别"""
    if isinstance(outcome, Timeout):
        return EXIT_TIMEOUT
    if isinstance(outcome, Stuck):
        return EXIT_FAILURE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lambda-iam", description="λ-IAM：无环境的 GoI 记号机")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def term_command(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("term", nargs="?", help="项，例如 \"(\\x.x x)(\\y.y)\"")
        sub.add_argument("--file", help="从文件读入项")
        sub.add_argument("--fuel", type=int, help="燃料（最多转移次数）")
        sub.add_argument("--json", action="store_true", help="输出 JSON")
        return sub

    sub = term_command("run", "运行机器并打印轨迹")
    sub.add_argument("--k", type=int, help="初始 tape 上 𝗉 的个数")
    sub.add_argument("--trace-json", action="store_true", help="以 JSON lines 输出轨迹")

    sub = term_command("sem", "计算 ⟦t⟧k")
    sub.add_argument("--k", type=int, help="深度")

    term_command("reduce", "线性头归约到 ⊸-范式")

    sub = term_command("diff", "沿 ⊸ 序列比较语义与运行长度")
    sub.add_argument("--k", type=int, help="深度")

    sub = term_command("goi", "带 log 位置与 GoI 栈的对照")
    sub.add_argument("--k", type=int, help="深度")
    sub.add_argument("--check", action="store_true", help="检查宏观/微观一致性，不一致时退出码为 3")

    sub = subparsers.add_parser("check", help="运行检查套件")
    sub.add_argument("--suite", action="append", help="套件名，可重复；缺省运行全部套件")
    sub.add_argument("--list", action="store_true", help="列出可用套件")
    sub.add_argument("--seed", type=int, help="随机种子")
    sub.add_argument("--size", type=int, help="项的最大结点数")
    sub.add_argument("--count", type=int, help="项集合大小")
    sub.add_argument("--depth", type=int, help="可穷尽性检查深度")
    sub.add_argument("--fuel", type=int, help="机器燃料")
    sub.add_argument("--kmax", type=int, help="长度与充分性套件的最大 k")
    sub.add_argument("--workers", type=int, help="工作线程数")
    sub.add_argument("--json", action="store_true", help="输出 JSON 报告")
    return parser


def read_term(args) -> Term:
    """
    从位置参数或 --file 读入项

    Raises:
        TermSyntaxError: 语法错误
        ValueError: 没有给出项
    """
    if args.file:
        text = Path(args.file).read_text(encoding="utf-8")
    elif args.term is not None:
        text = args.term
    else:
        raise ValueError("需要给出项或 --file")
    return parse(text)


def cmd_run(args, cfg) -> int:
    t = read_term(args)
    k = cfg.IAM_K if args.k is None else args.k
    result = run(t, k, args.fuel or cfg.IAM_FUEL)
    outcome = classify(result.outcome)
    if args.trace_json:
        for i, s in enumerate(result.trace):
            print(json.dumps(trace_record(i, s), ensure_ascii=False))
    elif args.json:
        print(json.dumps({
            "final": describe_outcome(result.outcome),
            "semantics": semantics_to_dict(outcome),
            "steps": result.steps,
            "trace": [trace_record(i, s) for i, s in enumerate(result.trace)],
        }, ensure_ascii=False))
    else:
        for line in format_trace(result):
            print(line)
    return exit_code_for(outcome)


def cmd_sem(args, cfg) -> int:
    t = read_term(args)
    k = cfg.IAM_K if args.k is None else args.k
    result = run(t, k, args.fuel or cfg.IAM_FUEL, keep_trace=False)
    outcome = classify(result.outcome)
    if args.json:
        print(json.dumps({**semantics_to_dict(outcome), "k": k, "steps": result.steps}, ensure_ascii=False))
    else:
        print(outcome)
    return exit_code_for(outcome)


def cmd_reduce(args, cfg) -> int:
    t = read_term(args)
    result = lhe_normalize(t, args.fuel or cfg.IAM_LHE_FUEL)
    for redex, after in result.steps:
        print(json.dumps({
            "rule": redex.rule.value,
            "site": path_to_json(redex.site),
            "term": pretty(after),
        }, ensure_ascii=False))
    if not result.normal:
        logger.info(f"归约在 {len(result.steps)} 步后燃料耗尽")
        return EXIT_TIMEOUT
    return EXIT_OK


def cmd_diff(args, cfg) -> int:
    t = read_term(args)
    k = cfg.IAM_K if args.k is None else args.k
    table = step_table(t, k, args.fuel or cfg.IAM_FUEL, cfg.IAM_LHE_FUEL)
    if args.json:
        print(json.dumps({
            "term": pretty(t),
            "k": k,
            "normal": table.normal,
            "ok": table.ok,
            "rows": [row.to_dict() for row in table.rows],
        }, ensure_ascii=False))
    else:
        for line in format_step_table(table):
            print(line)
    if not table.ok:
        return EXIT_FAILURE
    return EXIT_OK if table.normal else EXIT_TIMEOUT


def cmd_goi(args, cfg) -> int:
    t = read_term(args)
    k = cfg.IAM_K if args.k is None else args.k
    result = run(t, k, args.fuel or cfg.IAM_FUEL)
    rows = goi_rows(result)
    report = check_coherence(result) if args.check else None
    if args.json:
        payload = {"term": pretty(t), "k": k, "final": describe_outcome(result.outcome), "rows": rows}
        if report is not None:
            payload["coherent"] = report.ok
            payload["failures"] = [failure.__dict__ for failure in report.failures]
        print(json.dumps(payload, ensure_ascii=False))
    else:
        print("i | dir | B | S | |L| | |T| | rule")
        for row in rows:
            print(f"{row['i']} | {row['dir']} | {row['B']} | {row['S']} | "
                  f"{row['log_length']} | {row['tape_length']} | {row['rule'] or ''}")
        print(describe_outcome(result.outcome))
        if report is not None:
            print(f"一致性: 检查 {report.checked} 个转移，失败 {len(report.failures)}")
            for failure in report.failures:
                print(f"  {failure.index} {failure.rule}: {failure.detail}")
    if report is not None and not report.ok:
        return EXIT_FAILURE
    return exit_code_for(classify(result.outcome))


def cmd_check(args, cfg) -> int:
    from suite_loader import SuiteContext, SuiteLoader

    loader = SuiteLoader(cfg.IAM_SUITES_DIR)
    loader.load_all()
    if args.list:
        for info in loader.list_suites():
            print(f"{info['name']} (v{info['version']}): {info['description']}")
        return EXIT_OK
    context = SuiteContext.from_config(
        cfg, seed=args.seed, count=args.count, max_size=args.size, depth=args.depth,
        fuel=args.fuel, kmax=args.kmax, workers=args.workers,
    )
    names = args.suite or [info["name"] for info in loader.list_suites()]
    reports = [loader.run_suite(name, context) for name in names]
    if args.json:
        print(json.dumps({
            "seed": context.seed,
            "ok": all(report.ok for report in reports),
            "suites": [report.to_dict() for report in reports],
        }, ensure_ascii=False, indent=2))
    else:
        for report in reports:
            status = "通过" if report.ok else "失败"
            print(f"[{status}] {report.name} seed={report.seed} 检查 {report.checked} 项, "
                  f"失败 {report.failure_count}, 标记 {report.flagged_count}")
            for failure in report.failures:
                print(f"    {json.dumps(failure, ensure_ascii=False)}")
    return EXIT_OK if all(report.ok for report in reports) else EXIT_FAILURE


COMMANDS = {
    "run": cmd_run,
    "sem": cmd_sem,
    "reduce": cmd_reduce,
    "check": cmd_check,
    "diff": cmd_diff,
    "goi": cmd_goi,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    命令行入口

    Args:
        argv: 参数列表，缺省为 sys.argv[1:]

    Returns:
        int: 退出码
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    # 加载环境变量后再读取配置
    from dotenv import load_dotenv
    load_dotenv()
    from config import config, setup_logging

    try:
        config.validate()
    except ValueError as e:
        print(f"配置错误: {e}", file=sys.stderr)
        return EXIT_USAGE
    setup_logging()

    fuel = getattr(args, "fuel", None)
    if fuel is not None and fuel <= 0:
        print(f"燃料必须为正: {fuel}", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "k", None) is not None and args.k < 0:
        print(f"深度 k 不能为负: {args.k}", file=sys.stderr)
        return EXIT_USAGE

    try:
        return COMMANDS[args.command](args, config)
    except TermSyntaxError as e:
        print(f"语法错误: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SuiteError as e:
        print(f"套件错误: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except (ValueError, OSError) as e:
        print(f"参数错误: {e}", file=sys.stderr)
        return EXIT_USAGE
    except IamError as e:
        logger.error(f"命令 {args.command} 失败: {e}", exc_info=True)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
