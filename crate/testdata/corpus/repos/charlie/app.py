# Fully configured call: pinned model, system message, bounds, temperature,
# and a response schema. Planted: zero findings.

import json

from openai import OpenAI

client = OpenAI(timeout=30.0, max_retries=2)

REPORT_SCHEMA = {
    "type": "object",
    "properties": {"title": {"type": "string"}, "severity": {"type": "string"}},
    "required": ["title", "severity"],
}


def file_report(description):
    response = client.chat.completions.create(
        model="gpt-4o-2024-11-20",
        messages=[
            {"role": "system", "content": "Convert bug descriptions to reports."},
            {"role": "user", "content": description},
        ],
        max_tokens=300,
        temperature=0.0,
        response_format={
            "type": "json_schema",
            "json_schema": {"name": "report", "schema": REPORT_SCHEMA},
        },
    )
    return json.loads(response.choices[0].message.content)
