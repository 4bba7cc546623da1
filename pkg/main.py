#!/usr/bin/env python3
"""
λ-IAM HTTP 服务启动脚本
"""
from pathlib import Path


def check_env_file() -> bool:
    """.env 缺失时给出提示；配置项都有缺省值，不阻止启动"""
    env_file = Path(__file__).parent / ".env"
    env_example = Path(__file__).parent / ".env.example"

    if not env_file.exists() and env_example.exists():
        print(f"\n未找到 .env 文件，使用缺省配置（参考 .env.example）")
        print(f"位置: {env_file}")
        return False

    return True


def main():
    """主函数"""
    print("=" * 50)
    print("λ-IAM 服务启动")
    print("=" * 50)

    check_env_file()

    # 加载环境变量
    from dotenv import load_dotenv
    load_dotenv()

    # 验证配置
    from config import config, setup_logging
    try:
        config.validate()
        print("\n配置验证通过！")
    except ValueError as e:
        print(f"\n配置错误: {e}")
        return

    setup_logging()

    # 启动服务
    print(f"\n启动服务在 http://{config.API_HOST}:{config.API_PORT}")
    print("=" * 50)

    import uvicorn
    uvicorn.run(
        "app:app",
        host=config.API_HOST,
        port=config.API_PORT,
        reload=False
    )


if __name__ == "__main__":
    main()
