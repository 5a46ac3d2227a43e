# Scheduled tasks. Planted: three moving aliases (NMVP x3).

from openai import OpenAI

client = OpenAI(timeout=25.0, max_retries=2)


def digest(items):
    response = client.chat.completions.create(
        model="gpt-4o-mini",
        messages=[
            {"role": "system", "content": "Write the daily digest."},
            {"role": "user", "content": "\n".join(items)},
        ],
        max_tokens=600,
        temperature=0.3,
    )
    return response.choices[0].message.content


def escalation_note(alerts):
    response = client.chat.completions.create(
        model="gpt-4.1-nano",
        messages=[
            {"role": "system", "content": "Summarize alerts for on-call."},
            {"role": "user", "content": "\n".join(alerts)},
        ],
        max_tokens=200,
        temperature=0.0,
    )
    return response.choices[0].message.content


def weekly_report(metrics):
    response = client.chat.completions.create(
        model="chatgpt-4o-latest",
        messages=[
            {"role": "system", "content": "Draft the weekly report."},
            {"role": "user", "content": metrics},
        ],
        max_tokens=800,
        temperature=0.4,
    )
    return response.choices[0].message.content
