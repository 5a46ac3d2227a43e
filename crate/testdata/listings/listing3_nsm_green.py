"""System message present: a system turn anchors role and constraints."""

from openai import OpenAI

client = OpenAI(timeout=30, max_retries=2)

response = client.chat.completions.create(
    model="gpt-4o-2024-11-20",
    messages=[
        {"role": "system", "content": "You are a Computer Science tutor. Answer clearly."},
        {"role": "user", "content": "Explain recursion with an example"},
    ],
    max_tokens=256,
    temperature=0.2,
)
print(response.choices[0].message.content)
