"""No model version pinning: the call rides the moving gpt-4o alias."""

from openai import OpenAI

client = OpenAI(timeout=30, max_retries=2)
messages = [
    {"role": "system", "content": "You are a Computer Science tutor. Answer clearly."},
    {"role": "user", "content": "Explain recursion with an example."},
]

response = client.chat.completions.create(
    model="gpt-4o",
    messages=messages,
    max_tokens=256,
    temperature=0.0,
)
print(response.choices[0].message.content)
