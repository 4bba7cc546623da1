from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from typing import Optional
import logging

from config import config, setup_logging
from errors import TermSyntaxError
from goi import check_coherence, goi_rows
from machine import classify, describe_outcome, run, semantics_to_dict, trace_record
from reduction import lhe_normalize
from syntax import parse, path_to_json, pretty

logger = logging.getLogger(__name__)

app = FastAPI(title="λ-IAM 服务")


class MachineRequest(BaseModel):
    term: str
    k: Optional[int] = None
    fuel: Optional[int] = None


class ReduceRequest(BaseModel):
    term: str
    fuel: Optional[int] = None


def _parse(text: str):
    try:
        return parse(text)
    except TermSyntaxError as e:
        raise HTTPException(status_code=400, detail=f"语法错误: {e}")


def _machine_args(body: MachineRequest):
    k = config.IAM_K if body.k is None else body.k
    fuel = config.IAM_FUEL if body.fuel is None else body.fuel
    if k < 0 or fuel <= 0:
        raise HTTPException(status_code=400, detail=f"参数无效: k={k}, fuel={fuel}")
    return _parse(body.term), k, fuel


def _server_error(name: str, e: Exception) -> JSONResponse:
    logger.error(f"处理 {name} 请求失败: {e}", exc_info=True)
    return JSONResponse(content={"code": -1, "msg": str(e)}, status_code=500)


@app.get("/")
async def root():
    """健康检查"""
    return {"status": "ok", "service": "lambda-iam"}


@app.post("/sem")
def sem(body: MachineRequest):
    """计算 ⟦t⟧k 与运行长度"""
    t, k, fuel = _machine_args(body)
    try:
        result = run(t, k, fuel, keep_trace=False)
        return {"outcome": semantics_to_dict(classify(result.outcome)), "steps": result.steps}
    except Exception as e:
        return _server_error("/sem", e)


@app.post("/run")
def run_machine(body: MachineRequest):
    """运行机器并返回 JSON 轨迹"""
    t, k, fuel = _machine_args(body)
    try:
        result = run(t, k, fuel)
        return {
            "final": describe_outcome(result.outcome),
            "outcome": semantics_to_dict(classify(result.outcome)),
            "steps": result.steps,
            "trace": [trace_record(i, s) for i, s in enumerate(result.trace)],
        }
    except Exception as e:
        return _server_error("/run", e)


@app.post("/reduce")
def reduce(body: ReduceRequest):
    """线性头归约序列"""
    t = _parse(body.term)
    fuel = config.IAM_LHE_FUEL if body.fuel is None else body.fuel
    if fuel <= 0:
        raise HTTPException(status_code=400, detail=f"参数无效: fuel={fuel}")
    try:
        result = lhe_normalize(t, fuel)
        return {
            "steps": [
                {"rule": redex.rule.value, "site": path_to_json(redex.site), "term": pretty(after)}
                for redex, after in result.steps
            ],
            "normal": result.normal,
        }
    except Exception as e:
        return _server_error("/reduce", e)


@app.post("/goi")
def goi(body: MachineRequest):
    """逐状态的 GoI 栈与一致性结论"""
    t, k, fuel = _machine_args(body)
    try:
        result = run(t, k, fuel)
        report = check_coherence(result)
        return {
            "final": describe_outcome(result.outcome),
            "rows": goi_rows(result),
            "coherent": report.ok,
            "checked": report.checked,
            "failures": [
                {"index": failure.index, "rule": failure.rule, "detail": failure.detail}
                for failure in report.failures
            ],
        }
    except Exception as e:
        return _server_error("/goi", e)


@app.on_event("startup")
async def startup_event():
    """服务启动时的初始化"""
    setup_logging()
    logger.info("λ-IAM 服务启动")
    try:
        config.validate()
        logger.info("配置验证通过")
    except Exception as e:
        logger.error(f"服务初始化失败: {e}", exc_info=True)
